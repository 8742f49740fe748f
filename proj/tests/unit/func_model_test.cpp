#include <cmath>
#include <cstring>
#include <limits>

#include <gtest/gtest.h>

#include <axiograd/activations.hpp>
#include <axiograd/cases.hpp>
#include <axiograd/errors.hpp>
#include <axiograd/expr.hpp>
#include <axiograd/io.hpp>
#include <axiograd/max_expr.hpp>
#include <axiograd/model.hpp>
#include <axiograd/net.hpp>
#include <axiograd/random.hpp>
#include <axiograd/taylor.hpp>

#include "oracles.hpp"

namespace axiograd {
namespace {

using E = AnalyticExpr;

TEST(Box, RejectsInvertedBounds) {
  EXPECT_THROW(Box({0.0, 1.0}, {1.0, 1.0}), InvalidModel);
  EXPECT_NO_THROW(Box({0.0, -1.0}, {1.0, 0.0}));
}

TEST(MultiIndex, NormAndFactorialProduct) {
  const MultiIndex m({3, 0, 2});
  EXPECT_EQ(m.one_norm(), 5u);
  EXPECT_DOUBLE_EQ(m.factorial_product(), 6.0 * 1.0 * 2.0);
}

TEST(Eval, MonomialAtOnes) {
  const Model f(monomial(MultiIndex({2, 1}), Vec{0.0, 0.0}), 2);
  EXPECT_EQ(eval(f, Vec{1.0, 1.0}), 1.0);
}

TEST(Eval, ConstantExpression) {
  const Model f(E::constant(7.0), 3);
  EXPECT_EQ(eval(f, Vec{0.3, -2.0, 9.0}), 7.0);
}

TEST(Eval, MaxNetByHand) {
  const Model f = testing::max_net();
  const double x1 = 3.0;
  const double x2 = 5.0;
  EXPECT_EQ(eval(f, Vec{x1, x2}), std::max(x1 - x2, 0.0) + x2);
}

TEST(Eval, DimensionMismatch) {
  const Model f(E::variable(0), 2);
  EXPECT_THROW(eval(f, Vec{1.0}), DimensionMismatch);
}

TEST(Eval, OutOfDomain) {
  const Model f(E::variable(0), 1, Box({0.0}, {1.0}));
  EXPECT_THROW(eval(f, Vec{2.0}), OutOfDomain);
}

TEST(Eval, PureAndBitIdentical) {
  CaseGenerator gen(7, 3);
  for (int k = 0; k < 20; ++k) {
    const Model f = gen.model(3, true);
    const Vec x = gen.point();
    const double a = eval(f, x);
    const double b = eval(f, x);
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
  }
}

TEST(RewriteMaxToRelu, TwoInputs) {
  const LayeredNet net = rewrite_max_to_relu(testing::max2(), 2);
  EXPECT_EQ(net.eval(Vec{1.0, 0.0}), 1.0);
}

TEST(RewriteMaxToRelu, Idempotence) {
  const MaxExpr m = MaxExpr::max({MaxExpr::input(0), MaxExpr::input(0)});
  const LayeredNet net = rewrite_max_to_relu(m, 1);
  for (double x : {-2.5, 0.0, 1.25}) EXPECT_EQ(net.eval(Vec{x}), x);
}

TEST(RewriteMaxToRelu, ThreeInputsNested) {
  const MaxExpr m = MaxExpr::max({MaxExpr::input(0), MaxExpr::input(1), MaxExpr::input(2)});
  const LayeredNet net = rewrite_max_to_relu(m, 3);
  EXPECT_EQ(net.eval(Vec{1.0, 4.0, 2.0}), 4.0);
  EXPECT_EQ(m.eval(Vec{1.0, 4.0, 2.0}), 4.0);
}

TEST(RewriteMaxToRelu, UnsupportedNode) {
  const MaxExpr m = MaxExpr::unsupported("min", {MaxExpr::input(0), MaxExpr::input(1)});
  EXPECT_THROW(rewrite_max_to_relu(m, 2), UnsupportedNode);
}

TEST(RewriteMaxToRelu, AgreesWithDirectMaxOnSeededPoints) {
  CaseGenerator gen(11, 3, Box::cube(3, -5.0, 5.0));
  for (int t = 0; t < 5; ++t) {
    const MaxExpr tree = gen.max_tree(3, 3);
    const LayeredNet net = rewrite_max_to_relu(tree, 3);
    for (int k = 0; k < 2000; ++k) {
      const Vec x = gen.point();
      const double direct = tree.eval(x);
      const double rewritten = net.eval(x);
      const double ulp = std::nextafter(std::abs(direct), std::numeric_limits<double>::infinity()) - std::abs(direct);
      ASSERT_LE(std::abs(direct - rewritten), 4.0 * std::max(ulp, 1e-15)) << "tree " << t << " point " << k;
    }
  }
}

TEST(Monomial, EmptyProductIsOne) {
  const E e = monomial(MultiIndex({0, 0}), Vec{3.0, -1.0});
  EXPECT_EQ(e.eval(Vec{10.0, 20.0}), 1.0);
}

TEST(Monomial, HighDegreeExactPowerOfTwo) {
  const E e = monomial(MultiIndex({100, 1}), Vec{0.0, 0.0});
  EXPECT_EQ(e.eval(Vec{2.0, 2.0}), std::ldexp(1.0, 101));
}

TEST(Monomial, ShiftedCenter) {
  const E e = monomial(MultiIndex({1, 1}), Vec{1.0, 1.0});
  EXPECT_EQ(e.eval(Vec{2.0, 3.0}), (2.0 - 1.0) * (3.0 - 1.0));
}

TEST(SoftplusSmooth, ValueAtZero) {
  EXPECT_NEAR(softplus(0.0, 10.0), std::log(2.0) / 10.0, 1e-15);
  EXPECT_NEAR(softplus(0.0, 10.0), 0.0693147, 1e-7);
}

TEST(SoftplusSmooth, ReluFreeNetUnchanged) {
  CaseGenerator gen(3, 2);
  const LayeredNet net = gen.tanh_net(2, {4, 3});
  const LayeredNet smooth = softplus_smooth(net, 10.0);
  for (int k = 0; k < 50; ++k) {
    const Vec x = gen.point();
    EXPECT_EQ(net.eval(x), smooth.eval(x));
  }
}

TEST(SoftplusSmooth, GapBoundedByLn2OverAlpha) {
  const double alpha = 100.0;
  for (int k = 0; k <= 2000; ++k) {
    const double z = -10.0 + 20.0 * k / 2000.0;
    EXPECT_LE(std::abs(softplus(z, alpha) - std::max(z, 0.0)), std::log(2.0) / alpha + 1e-16);
  }
}

TEST(SoftplusSmooth, LargeArgumentsStayFinite) {
  EXPECT_EQ(softplus(1000.0, 1e5), 1000.0);
  EXPECT_EQ(softplus(-1000.0, 1e5), 0.0);
}

TEST(SoftplusSmooth, RejectsNonPositiveAlpha) {
  const LayeredNet net = rewrite_max_to_relu(testing::max2(), 2);
  EXPECT_THROW(softplus_smooth(net, 0.0), InvalidAlpha);
  EXPECT_THROW(softplus_smooth(net, -1.0), InvalidAlpha);
}

TEST(SoftplusSmooth, SupGapNonIncreasingInAlpha) {
  CaseGenerator gen(5, 2, Box::cube(2, -2.0, 2.0));
  const LayeredNet net = gen.relu_net(2, {5, 4});
  Rng rng(99);
  std::vector<Vec> points;
  for (int k = 0; k < 10000; ++k) points.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
  double previous = std::numeric_limits<double>::infinity();
  for (double alpha : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    const LayeredNet smooth = softplus_smooth(net, alpha);
    double sup = 0.0;
    for (const Vec& x : points) sup = std::max(sup, std::abs(smooth.eval(x) - net.eval(x)));
    EXPECT_LE(sup, previous) << "alpha " << alpha;
    previous = sup;
  }
}

TEST(Net, RejectsNonFiniteWeights) {
  Matrix w(1, 1, std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(LayeredNet(1, {AffineLayer{w, {0.0}}}), InvalidModel);
}

TEST(Net, RejectsBrokenDimensionChain) {
  EXPECT_THROW(LayeredNet(2, {AffineLayer{Matrix(1, 3), {0.0}}}), InvalidModel);
  EXPECT_THROW(LayeredNet(2, {AffineLayer{Matrix(2, 2), {0.0, 0.0}}}), InvalidModel);
}

TEST(Net, ToExpressionMatchesNet) {
  CaseGenerator gen(21, 3);
  const LayeredNet net = gen.tanh_net(3, {4, 4});
  const E e = to_expression(net);
  for (int k = 0; k < 100; ++k) {
    const Vec x = gen.point();
    EXPECT_NEAR(e.eval(x), net.eval(x), 1e-13);
  }
}

TEST(Taylor, LinearReproduced) {
  const E f = 3.0 * E::variable(0) + (-2.0) * E::variable(1) + E::constant(0.5);
  const E t = taylor(f, Vec{0.4, -0.7}, 1);
  CaseGenerator gen(1, 2);
  for (int k = 0; k < 20; ++k) {
    const Vec x = gen.point();
    EXPECT_NEAR(t.eval(x), f.eval(x), 1e-14);
  }
}

TEST(Taylor, ExpSecondOrder) {
  const E t = taylor(E::exp(E::variable(0)), Vec{0.0}, 2);
  for (double x : {-0.5, 0.1, 0.9}) EXPECT_NEAR(t.eval(Vec{x}), 1.0 + x + x * x / 2.0, 1e-15);
}

TEST(Taylor, ExpSumThirdOrderRemainder) {
  const E t = taylor(testing::exp_sum(), Vec{0.0, 0.0}, 3);
  const Vec x{0.1, 0.1};
  const double bound = std::exp(1.0) * std::pow(0.2, 4) / 24.0;
  EXPECT_LE(std::abs(t.eval(x) - std::exp(0.2)), bound);
  EXPECT_LE(std::abs(t.eval(x) - std::exp(0.2)), 1e-4);
}

TEST(Taylor, OrderTooLarge) {
  const E f = E::exp(E::variable(0) + E::variable(5));
  EXPECT_THROW(taylor(f, Vec(6, 0.0), 40, 1000), OrderTooLarge);
  EXPECT_EQ(taylor_term_count(2, 3), 10u);
}

TEST(Taylor, RemainderEventuallyMonotone) {
  const Vec center{0.0, 0.0};
  const Vec x{0.7, -0.4};
  const std::vector<std::pair<const char*, E>> cases{
      {"exp", testing::exp_sum()},
      {"sin", E::sin(E::variable(0)) * E::variable(1)},
      {"polynomial", E::power(E::variable(0), 3) + E::variable(0) * E::variable(1)}};
  for (const auto& [name, f] : cases) {
    Vec errors;
    for (unsigned l = 1; l <= 12; ++l) errors.push_back(std::abs(taylor(f, center, l).eval(x) - f.eval(x)));
    for (std::size_t l = 4; l < errors.size(); ++l) {
      EXPECT_LE(errors[l], errors[l - 1] + 1e-15) << name << " order " << l + 1;
    }
    EXPECT_LE(errors.back(), 1e-9) << name;
  }
}

TEST(Io, ModelJsonRoundTrip) {
  CaseGenerator gen(8, 3);
  for (ModelFamily fam : {ModelFamily::kPolynomial, ModelFamily::kAnalytic, ModelFamily::kTanhNet,
                          ModelFamily::kReluNet}) {
    const Model f = gen.model(3, fam);
    const Json j = model_to_json(f);
    const Model g = model_from_json(j);
    EXPECT_EQ(model_to_json(g), j);
    for (int k = 0; k < 10; ++k) {
      const Vec x = gen.point();
      EXPECT_EQ(eval(f, x), eval(g, x));
    }
  }
}

TEST(Io, MaxTreeRoundTrip) {
  CaseGenerator gen(9, 2);
  const Model f(gen.max_tree(2, 3), 2);
  const Model g = model_from_json(model_to_json(f));
  for (int k = 0; k < 10; ++k) {
    const Vec x = gen.point();
    EXPECT_EQ(eval(f, x), eval(g, x));
  }
}

TEST(Io, ShippedModelsLoad) {
  for (const char* name : {"mono_2_1.json", "mono_100_1.json", "max.json", "max_net.json", "expsum.json", "cubic.json",
                           "sin_product.json", "tanh_net.json"}) {
    EXPECT_NO_THROW(load_model(testing::model_path(name))) << name;
  }
  const Model net = load_model(testing::model_path("max_net.json"));
  EXPECT_EQ(eval(net, Vec{3.0, 5.0}), 5.0);
  EXPECT_EQ(eval(net, Vec{4.0, -1.0}), 4.0);
}

TEST(Io, RejectsNonFiniteWeightInJson) {
  Json j = Json::parse(R"({"dim":1,"layers":[{"type":"affine","W":[[1]],"b":[0]}]})");
  j["layers"][0]["W"][0][0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(model_from_json(j), InvalidModel);
}

TEST(Io, RejectsUnknownOp) {
  const Json j = Json::parse(R"({"dim":1,"expr":{"op":"gamma","args":[{"op":"var","index":0}]}})");
  EXPECT_THROW(model_from_json(j), InvalidModel);
}

}  // namespace
}  // namespace axiograd
