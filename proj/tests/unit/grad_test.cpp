#include <cmath>
#include <limits>
#include <variant>

#include <gtest/gtest.h>

#include <axiograd/cases.hpp>
#include <axiograd/errors.hpp>
#include <axiograd/grad.hpp>
#include <axiograd/model.hpp>
#include <axiograd/net.hpp>

#include "oracles.hpp"

namespace axiograd {
namespace {

using E = AnalyticExpr;

TEST(Partial, MonomialTwoOne) {
  const Model f(monomial(MultiIndex({2, 1}), Vec{0.0, 0.0}), 2);
  EXPECT_EQ(partial(f, 0, Vec{1.0, 1.0}), 2.0);
  EXPECT_EQ(partial(f, 1, Vec{1.0, 1.0}), 1.0);
}

TEST(Partial, MaxNetOnDiagonalIsNondifferentiable) {
  const Model f = testing::max_net();
  for (double t : {-1.0, 0.0, 0.3, 2.0}) {
    EXPECT_THROW(partial(f, 0, Vec{t, t}), NondifferentiableAt) << t;
  }
  try {
    partial(f, 1, Vec{0.5, 0.5});
    FAIL() << "expected NondifferentiableAt";
  } catch (const NondifferentiableAt& e) {
    EXPECT_FALSE(e.kink_units().empty());
  }
}

TEST(Partial, MaxTreeOnDiagonalIsNondifferentiable) {
  const Model f(testing::max2(), 2);
  EXPECT_THROW(partial(f, 0, Vec{0.4, 0.4}), NondifferentiableAt);
}

TEST(Partial, SigmoidAtZero) {
  const Model f(E::sigmoid(E::variable(0)), 1);
  EXPECT_DOUBLE_EQ(partial(f, 0, Vec{0.0}), 0.25);
}

TEST(Grad, LinearIsConstant) {
  const Vec c{1.5, -2.0, 0.25};
  const Model f(c[0] * E::variable(0) + c[1] * E::variable(1) + c[2] * E::variable(2), 3);
  CaseGenerator gen(4, 3);
  for (int k = 0; k < 20; ++k) {
    const GradResult r = grad(f, gen.point());
    EXPECT_TRUE(r.differentiable);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(r.gradient[i], c[i]);
  }
}

TEST(Grad, SmoothedMaxOnDiagonal) {
  const Model f(softplus_smooth(rewrite_max_to_relu(testing::max2(), 2), 1e3));
  const Vec x{1.0, 1.0};
  const GradResult r = grad(f, x);
  ASSERT_TRUE(r.differentiable);
  EXPECT_NEAR(r.gradient[0], 0.5, 1e-3);
  EXPECT_NEAR(r.gradient[1], 0.5, 1e-3);
  const Vec fd = testing::richardson_gradient([&](VecView y) { return eval(f, y); }, x, 1e-5);
  EXPECT_NEAR(fd[0], r.gradient[0], 1e-6);
  EXPECT_NEAR(fd[1], r.gradient[1], 1e-6);
}

TEST(Grad, HighDegreeMonomial) {
  const Model f(monomial(MultiIndex({100, 1}), Vec{0.0, 0.0}), 2);
  const GradResult r = grad(f, Vec{2.0, 2.0});
  EXPECT_EQ(r.gradient[0], 100.0 * std::ldexp(1.0, 99) * 2.0);
  EXPECT_EQ(r.gradient[1], std::ldexp(1.0, 100));
  const Vec fd = testing::richardson_gradient([&](VecView y) { return eval(f, y); }, Vec{2.0, 2.0}, 1e-4);
  EXPECT_NEAR(fd[0] / r.gradient[0], 1.0, 1e-8);
  EXPECT_NEAR(fd[1] / r.gradient[1], 1.0, 1e-8);
}

TEST(Grad, KinkReportedNotRaised) {
  const GradResult r = grad(testing::max_net(), Vec{1.0, 1.0});
  EXPECT_FALSE(r.differentiable);
  EXPECT_FALSE(r.kink_units.empty());
  const GradResult off = grad(testing::max_net(), Vec{2.0, 1.0});
  EXPECT_TRUE(off.differentiable);
  EXPECT_TRUE(off.kink_units.empty());
  EXPECT_EQ(off.gradient, (Vec{1.0, 0.0}));
}

TEST(Grad, MatchesRichardsonOracleOnAnalyticModels) {
  CaseGenerator gen(31, 3, Box::cube(3, -0.9, 0.9));
  for (const auto& [name, f] : testing::analytic_models()) {
    for (int k = 0; k < 20; ++k) {
      Vec x = gen.point();
      x.resize(f.dim());
      const Vec exact = grad(f, x).gradient;
      const Vec fd = testing::richardson_gradient([&](VecView y) { return eval(f, y); }, x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(exact[i], fd[i], 1e-7 * (1.0 + std::abs(exact[i]))) << name << " input " << i;
      }
    }
  }
}

TEST(FdCheck, QuadraticIsExact) {
  const Model f(E::power(E::variable(0), 2) + 3.0 * E::variable(0) * E::variable(1) + E::constant(2.0), 2);
  for (double h : {1e-1, 1e-3, 1e-5}) EXPECT_LE(fd_check(f, Vec{0.3, -0.2}, h), 1e-10) << h;
}

TEST(FdCheck, ExpSum) {
  EXPECT_LE(fd_check(Model(testing::exp_sum(), 2), Vec{0.3, 0.4}, 1e-5), 1e-8);
}

TEST(FdCheck, RandomTanhNet) {
  CaseGenerator gen(42, 3);
  const Model f(gen.tanh_net(3, {5, 5}));
  for (int k = 0; k < 50; ++k) EXPECT_LE(fd_check(f, gen.point(), 1e-5), 1e-6);
}

TEST(FdCheck, NearKinkRaises) {
  EXPECT_THROW(fd_check(testing::max_net(), Vec{1.0, 1.0 + 1e-7}, 1e-5), NondifferentiableNearby);
}

TEST(FdCheck, AnalyticModelsOnSeededPoints) {
  const double h = 1e-5 * 2.0;
  for (const auto& [name, f] : testing::analytic_models()) {
    CaseGenerator gen(77, f.dim(), Box::cube(f.dim(), -1.0 + h, 1.0 - h));
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) worst = std::max(worst, fd_check(f, gen.point(), h));
    EXPECT_LE(worst, 1e-6) << name;
  }
}

TEST(Grad, LinearityOfDerivative) {
  CaseGenerator gen(13, 3);
  for (int k = 0; k < 30; ++k) {
    const Model f = gen.model(3, ModelFamily::kAnalytic);
    const Model g = gen.model(3, ModelFamily::kTanhNet);
    const double a = gen.rng().uniform(-2.0, 2.0);
    const double b = gen.rng().uniform(-2.0, 2.0);
    const Model combo = Model::combination({{a, f}, {b, g}});
    const Vec x = gen.point();
    for (std::size_t i = 0; i < 3; ++i) {
      const double pf = a * partial(f, i, x);
      const double pg = b * partial(g, i, x);
      const double scale = std::max({std::abs(pf), std::abs(pg), std::numeric_limits<double>::min()});
      EXPECT_LE(std::abs(partial(combo, i, x) - (pf + pg)), 4.0 * std::numeric_limits<double>::epsilon() * scale);
    }
  }
}

/// Smallest |pre-activation| over the relu units of `net` at x.
double relu_margin(const LayeredNet& net, VecView x) {
  Vec h(x.begin(), x.end());
  double margin = std::numeric_limits<double>::infinity();
  for (const Layer& layer : net.layers()) {
    if (const auto* aff = std::get_if<AffineLayer>(&layer)) {
      Vec next = aff->weight.apply(h);
      for (std::size_t r = 0; r < next.size(); ++r) next[r] += aff->bias[r];
      h = std::move(next);
    } else {
      const auto& acts = std::get<ElementwiseLayer>(layer).acts;
      for (std::size_t u = 0; u < h.size(); ++u) {
        if (acts[u].kind == ActKind::kRelu) margin = std::min(margin, std::abs(h[u]));
        h[u] = acts[u].apply(h[u]);
      }
    }
  }
  return margin;
}

TEST(Grad, SoftplusGradientConvergesAtDifferentiablePoints) {
  CaseGenerator gen(17, 2);
  const LayeredNet net = gen.relu_net(2, {6, 4});
  const Model f(net);
  const Vec alphas{1.0, 1e1, 1e2, 1e3, 1e4, 1e5};
  int checked = 0;
  for (int k = 0; k < 200; ++k) {
    const Vec x = gen.point();
    const GradResult exact = grad(f, x);
    if (!exact.differentiable) continue;
    // The tail starts once alpha times the distance to the nearest kink exceeds 10.
    const double margin = relu_margin(net, x);
    double previous = std::numeric_limits<double>::infinity();
    for (double alpha : alphas) {
      if (alpha * margin < 10.0) continue;
      const double dev = max_abs_diff(grad(Model(softplus_smooth(net, alpha)), x).gradient, exact.gradient);
      EXPECT_LE(dev, previous + 1e-12) << "point " << k << " alpha " << alpha;
      previous = dev;
    }
    if (margin * alphas.back() >= 10.0) {
      EXPECT_LE(previous, 1e-3) << "point " << k;
    }
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

}  // namespace
}  // namespace axiograd
