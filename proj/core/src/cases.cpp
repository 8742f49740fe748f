#include "axiograd/cases.hpp"

#include <algorithm>
#include <cmath>

#include "axiograd/errors.hpp"

namespace axiograd {

CaseGenerator::CaseGenerator(std::uint64_t seed, std::size_t dim, Box box)
    : seed_(seed), dim_(dim), box_(std::move(box)), rng_(seed) {
  if (dim_ == 0) throw InvalidConfig("case dimension must be positive");
  if (box_.dim() != dim_ || !box_.bounded()) throw InvalidConfig("case box must be bounded and match the dimension");
}

CaseGenerator::CaseGenerator(std::uint64_t seed, std::size_t dim)
    : CaseGenerator(seed, dim, Box::cube(dim == 0 ? 1 : dim, -1.0, 1.0)) {
  if (dim == 0) throw InvalidConfig("case dimension must be positive");
}

Vec CaseGenerator::point() { return point(box_); }

Vec CaseGenerator::point(const Box& b) {
  Vec x(b.dim());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng_.uniform(b.lower()[i], b.upper()[i]);
  return x;
}

Vec CaseGenerator::point_away(VecView from, const std::vector<std::size_t>& coords, double min_gap) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec x = point();
    bool ok = true;
    for (std::size_t i : coords) ok = ok && std::abs(x[i] - from[i]) >= min_gap;
    if (ok) return x;
  }
  throw InvalidConfig("could not draw a point away from the baseline; box too small for the gap");
}

AnalyticExpr CaseGenerator::polynomial(std::size_t n, unsigned degree, std::size_t terms) {
  std::vector<AnalyticExpr> parts;
  for (std::size_t t = 0; t < terms; ++t) {
    const MultiIndex m = multi_index(n, degree);
    parts.push_back(AnalyticExpr::scale(rng_.uniform(-2.0, 2.0), monomial(m, Vec(n, 0.0))));
  }
  return AnalyticExpr::sum(std::move(parts));
}

AnalyticExpr CaseGenerator::ridge(std::size_t n) {
  std::vector<AnalyticExpr> parts;
  for (std::size_t i = 0; i < n; ++i) {
    parts.push_back(AnalyticExpr::scale(rng_.uniform(-1.0, 1.0), AnalyticExpr::variable(i)));
  }
  parts.push_back(AnalyticExpr::constant(rng_.uniform(-0.5, 0.5)));
  return AnalyticExpr::sum(std::move(parts));
}

AnalyticExpr CaseGenerator::analytic(std::size_t n) {
  std::vector<AnalyticExpr> parts{polynomial(n, 3, 3)};
  parts.push_back(AnalyticExpr::scale(rng_.uniform(-1.5, 1.5), AnalyticExpr::sin(ridge(n))));
  parts.push_back(AnalyticExpr::scale(rng_.uniform(-1.0, 1.0), AnalyticExpr::exp(ridge(n))));
  parts.push_back(AnalyticExpr::scale(rng_.uniform(-1.5, 1.5), AnalyticExpr::tanh(ridge(n))));
  return AnalyticExpr::sum(std::move(parts));
}

LayeredNet CaseGenerator::net(std::size_t n, const std::vector<std::size_t>& widths, Activation act) {
  std::vector<Layer> layers;
  std::size_t in = n;
  auto affine = [&](std::size_t out) {
    AffineLayer a{Matrix(out, in), Vec(out)};
    for (std::size_t r = 0; r < out; ++r) {
      for (std::size_t c = 0; c < in; ++c) a.weight(r, c) = rng_.uniform(-1.0, 1.0);
      a.bias[r] = rng_.uniform(-0.5, 0.5);
    }
    layers.emplace_back(std::move(a));
    in = out;
  };
  for (std::size_t w : widths) {
    affine(w);
    layers.emplace_back(ElementwiseLayer{std::vector<Activation>(w, act)});
  }
  affine(1);
  return LayeredNet(n, std::move(layers));
}

LayeredNet CaseGenerator::tanh_net(std::size_t n, const std::vector<std::size_t>& widths) {
  return net(n, widths, Activation::tanh());
}

LayeredNet CaseGenerator::relu_net(std::size_t n, const std::vector<std::size_t>& widths) {
  return net(n, widths, Activation::relu());
}

MaxExpr CaseGenerator::max_tree(std::size_t n, int depth) {
  auto affine_leaf = [&]() {
    Vec w(n);
    std::vector<MaxExpr> args;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = rng_.uniform(-1.0, 1.0);
      args.push_back(MaxExpr::input(i));
    }
    return MaxExpr::affine(std::move(w), std::move(args), rng_.uniform(-0.5, 0.5));
  };
  if (depth <= 0) return affine_leaf();
  const std::size_t arity = 2 + rng_.index(2);
  std::vector<MaxExpr> args;
  for (std::size_t k = 0; k < arity; ++k) args.push_back(rng_.coin(0.4) ? max_tree(n, depth - 1) : affine_leaf());
  MaxExpr m = MaxExpr::max(std::move(args));
  // Occasionally wrap in an affine combination with another branch.
  if (rng_.coin(0.3)) {
    return MaxExpr::affine({rng_.uniform(0.2, 1.5), rng_.uniform(-1.0, 1.0)}, {m, affine_leaf()}, 0.0);
  }
  return m;
}

MultiIndex CaseGenerator::multi_index(std::size_t n, unsigned max_degree) {
  std::vector<unsigned> e(n, 0);
  const unsigned total = static_cast<unsigned>(rng_.index(max_degree + 1));
  for (unsigned k = 0; k < total; ++k) ++e[rng_.index(n)];
  return MultiIndex(std::move(e));
}

Model CaseGenerator::model(std::size_t n, ModelFamily family) {
  switch (family) {
    case ModelFamily::kPolynomial: return Model(polynomial(n, 4, 4), n);
    case ModelFamily::kAnalytic: return Model(analytic(n), n);
    case ModelFamily::kTanhNet: return Model(tanh_net(n, {4, 4}));
    case ModelFamily::kReluNet: return Model(relu_net(n, {5, 4}));
  }
  return Model(polynomial(n, 4, 4), n);
}

Model CaseGenerator::model(std::size_t n, bool allow_relu) {
  const std::size_t families = allow_relu ? 4 : 3;
  return model(n, static_cast<ModelFamily>(rng_.index(families)));
}

}  // namespace axiograd
