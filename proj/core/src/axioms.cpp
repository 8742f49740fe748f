#include "axiograd/axioms.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "axiograd/errors.hpp"
#include "axiograd/net.hpp"

namespace axiograd {
namespace {

constexpr std::array<std::string_view, 12> kAxiomIds{
    "completeness",    "linearity",         "dummy",
    "ndp",             "symmetry-preserving", "strong-symmetry",
    "asi",             "proportionality",   "symmetric-monotonicity",
    "c0-symmetric-monotonicity", "implementation-invariance", "monomial-distribution",
};

constexpr std::string_view kByConstruction = "hypothesis-by-construction";

using Cases = std::vector<Json>;

Vec vec_at(const Json& c, const char* key) { return c.at(key).get<Vec>(); }
Model model_at(const Json& c, const char* key) { return model_from_json(c.at(key)); }
std::size_t index_at(const Json& c, const char* key) { return c.at(key).get<std::size_t>(); }

Vec values_of(const Method& method, const Model& f, VecView x_bar, VecView x_prime) {
  Attribution a = method(f, x_bar, x_prime);
  if (a.values.size() != f.dim()) {
    throw InvalidConfig("method returned " + std::to_string(a.values.size()) + " values for " +
                        std::to_string(f.dim()) + " inputs");
  }
  return std::move(a.values);
}

double sum(const Vec& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

AnalyticExpr var(std::size_t i) { return AnalyticExpr::variable(i); }

std::vector<std::size_t> others(std::size_t n, std::initializer_list<std::size_t> skip) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::find(skip.begin(), skip.end(), k) == skip.end()) out.push_back(k);
  }
  return out;
}

/// sum_k w_k x_k + b over the listed inputs.
AnalyticExpr ridge_over(Rng& rng, const std::vector<std::size_t>& idx, double w_scale = 1.0) {
  std::vector<AnalyticExpr> parts;
  for (std::size_t k : idx) parts.push_back(rng.uniform(-w_scale, w_scale) * var(k));
  parts.push_back(AnalyticExpr::constant(rng.uniform(-0.5, 0.5)));
  return AnalyticExpr::sum(std::move(parts));
}

Json endpoints_case(const Model& f, const Vec& x_bar, const Vec& x_prime) {
  return {{"model", model_to_json(f)}, {"x_bar", x_bar}, {"x_prime", x_prime}};
}

std::pair<std::size_t, std::size_t> distinct_pair(Rng& rng, std::size_t n) {
  const std::size_t i = rng.index(n);
  std::size_t j = rng.index(n - 1);
  if (j >= i) ++j;
  return {i, j};
}

void require_pairs(const CaseGenerator& gen, std::string_view axiom) {
  if (gen.dim() < 2) throw InvalidConfig(std::string(axiom) + " needs at least two inputs");
}

// Symmetric in (i, j): H(x_i + x_j, x_i x_j, rest).
Model symmetric_model(CaseGenerator& gen, std::size_t n, std::size_t i, std::size_t j) {
  Rng& rng = gen.rng();
  const auto rest = others(n, {i, j});
  if (rng.coin(0.3)) {
    LayeredNet net = gen.tanh_net(n, {4, 3});
    std::vector<Layer> layers = net.layers();
    auto& first = std::get<AffineLayer>(layers.front());
    for (std::size_t r = 0; r < first.weight.rows(); ++r) first.weight(r, j) = first.weight(r, i);
    return Model(LayeredNet(n, std::move(layers)));
  }
  const AnalyticExpr u = var(i) + var(j);
  const AnalyticExpr v = var(i) * var(j);
  std::vector<AnalyticExpr> parts;
  for (int t = 0; t < 3; ++t) {
    std::vector<AnalyticExpr> factors;
    const int pu = static_cast<int>(rng.index(3));
    const int pv = static_cast<int>(rng.index(3));
    if (pu > 0) factors.push_back(pu == 1 ? u : AnalyticExpr::power(u, pu));
    if (pv > 0) factors.push_back(pv == 1 ? v : AnalyticExpr::power(v, pv));
    for (std::size_t r : rest) {
      if (rng.coin(0.3)) factors.push_back(var(r));
    }
    const double c = rng.uniform(-1.0, 1.0);
    parts.push_back(factors.empty() ? AnalyticExpr::constant(c) : c * AnalyticExpr::product(std::move(factors)));
  }
  parts.push_back(rng.uniform(-1.0, 1.0) * AnalyticExpr::sin(rng.uniform(-1.5, 1.5) * u + ridge_over(rng, rest)));
  parts.push_back(rng.uniform(-1.0, 1.0) * AnalyticExpr::tanh(rng.uniform(-1.5, 1.5) * v + ridge_over(rng, rest)));
  return Model(AnalyticExpr::sum(std::move(parts)), n);
}

/// x1 x2 on two inputs.
Model product_2d() { return Model(var(0) * var(1), 2); }

Json pair_case(const Model& f, std::size_t i, std::size_t j, const Vec& x_bar, const Vec& x_prime) {
  Json c = endpoints_case(f, x_bar, x_prime);
  c["i"] = i;
  c["j"] = j;
  return c;
}

// ---------------------------------------------------------------------------
// Case families.

Cases completeness_cases(CaseGenerator& gen, const CheckOptions& opt) {
  Cases out;
  const std::size_t n = gen.dim();
  for (std::size_t k = 0; k < opt.cases; ++k) {
    Model f = [&] {
      switch (k % 5) {
        case 0: return gen.model(n, ModelFamily::kPolynomial);
        case 1: return gen.model(n, ModelFamily::kAnalytic);
        case 2: return gen.model(n, ModelFamily::kTanhNet);
        case 3: return gen.model(n, ModelFamily::kReluNet);
        default: return Model(gen.max_tree(n), n);
      }
    }();
    const Vec x_bar = gen.point();
    const Vec x_prime = k % 10 == 9 ? x_bar : gen.point();
    out.push_back(endpoints_case(f, x_bar, x_prime));
  }
  return out;
}

Cases linearity_cases(CaseGenerator& gen, const CheckOptions& opt) {
  Cases out;
  const std::size_t n = gen.dim();
  for (std::size_t k = 0; k < opt.cases; ++k) {
    const Model f = gen.model(n, true);
    const Model g = gen.model(n, true);
    const double alpha = gen.rng().uniform(-2.0, 2.0);
    const double beta = gen.rng().uniform(-2.0, 2.0);
    const Vec x_bar = gen.point();
    const Vec x_prime = gen.point();
    out.push_back({{"f", model_to_json(f)},
                   {"g", model_to_json(g)},
                   {"alpha", alpha},
                   {"beta", beta},
                   {"x_bar", x_bar},
                   {"x_prime", x_prime}});
  }
  return out;
}

Cases dummy_cases(CaseGenerator& gen, const CheckOptions& opt) {
  Cases out;
  const std::size_t n = gen.dim();
  Rng& rng = gen.rng();
  for (std::size_t k = 0; k < opt.cases; ++k) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t a = n; a > 1; --a) std::swap(order[a - 1], order[rng.index(a)]);
    const std::size_t kept = (n == 1 || k % 10 == 9) ? 0 : 1 + rng.index(n - 1);
    std::vector<std::size_t> keep(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kept));
    std::vector<std::size_t> dummies(order.begin() + static_cast<std::ptrdiff_t>(kept), order.end());
    std::sort(keep.begin(), keep.end());
    std::sort(dummies.begin(), dummies.end());
    Model f = [&] {
      if (kept == 0) return Model(AnalyticExpr::constant(rng.uniform(-2.0, 2.0)), n);
      Matrix select(kept, n);
      for (std::size_t r = 0; r < kept; ++r) select(r, keep[r]) = 1.0;
      return Model::composed(gen.model(kept, true), std::move(select), Vec(kept, 0.0), Box::unbounded(n));
    }();
    Json c = endpoints_case(f, gen.point(), gen.point());
    c["dummies"] = dummies;
    out.push_back(std::move(c));
  }
  return out;
}

// Non-decreasing from x' to x_bar: every term is non-decreasing in s_i x_i
// with s_i = sign(x_bar_i - x'_i).
Model monotone_model(CaseGenerator& gen, const Vec& s) {
  Rng& rng = gen.rng();
  const std::size_t n = s.size();
  if (rng.coin(0.4)) {
    const Activation act = rng.coin() ? Activation::relu() : Activation::tanh();
    std::vector<Layer> layers;
    AffineLayer first{Matrix(4, n), Vec(4)};
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < n; ++c) first.weight(r, c) = s[c] * rng.uniform(0.0, 1.0);
      first.bias[r] = rng.uniform(-0.5, 0.5);
    }
    layers.emplace_back(std::move(first));
    layers.emplace_back(ElementwiseLayer{std::vector<Activation>(4, act)});
    AffineLayer second{Matrix(3, 4), Vec(3)};
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 4; ++c) second.weight(r, c) = rng.uniform(0.0, 1.0);
      second.bias[r] = rng.uniform(-0.5, 0.5);
    }
    layers.emplace_back(std::move(second));
    layers.emplace_back(ElementwiseLayer{std::vector<Activation>(3, act)});
    AffineLayer head{Matrix(1, 3), Vec(1, rng.uniform(-1.0, 1.0))};
    for (std::size_t c = 0; c < 3; ++c) head.weight(0, c) = rng.uniform(0.0, 1.0);
    layers.emplace_back(std::move(head));
    return Model(LayeredNet(n, std::move(layers)));
  }
  std::vector<AnalyticExpr> parts;
  std::vector<AnalyticExpr> joint;
  for (std::size_t i = 0; i < n; ++i) {
    const AnalyticExpr y = s[i] * var(i);
    const double a = rng.uniform(0.0, 1.5);
    const double c = rng.uniform(0.2, 2.0);
    const double e = rng.uniform(-0.5, 0.5);
    switch (rng.index(5)) {
      case 0: parts.push_back(a * y + rng.uniform(0.0, 1.0) * AnalyticExpr::power(y, 3)); break;
      case 1: parts.push_back(a * AnalyticExpr::tanh(c * y + AnalyticExpr::constant(e))); break;
      case 2: parts.push_back(a * AnalyticExpr::exp(c * y)); break;
      case 3: parts.push_back(a * AnalyticExpr::sigmoid(c * y + AnalyticExpr::constant(e))); break;
      default: parts.push_back(a * AnalyticExpr::softplus(c * y + AnalyticExpr::constant(e), rng.uniform(1.0, 5.0)));
    }
    joint.push_back(rng.uniform(0.0, 1.0) * y);
  }
  joint.push_back(AnalyticExpr::constant(rng.uniform(-0.5, 0.5)));
  parts.push_back(rng.uniform(0.0, 1.0) * AnalyticExpr::tanh(AnalyticExpr::sum(std::move(joint))));
  return Model(AnalyticExpr::sum(std::move(parts)), n);
}

Cases ndp_cases(CaseGenerator& gen, const CheckOptions& opt) {
  Cases out;
  const std::size_t n = gen.dim();
  for (std::size_t k = 0; k < opt.cases; ++k) {
    const Vec x_prime = gen.point();
    const Vec x_bar = k % 10 == 9 ? x_prime : gen.point();
    Vec s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = x_bar[i] >= x_prime[i] ? 1.0 : -1.0;
    out.push_back(endpoints_case(monotone_model(gen, s), x_bar, x_prime));
  }
  return out;
}

/// Half the cases use two inputs so that two-input path methods apply.
std::size_t mixed_dim(const CaseGenerator& gen, std::size_t k) { return k % 2 == 1 ? 2 : gen.dim(); }

Cases symmetry_cases(CaseGenerator& gen, const CheckOptions& opt) {
  require_pairs(gen, "symmetry-preserving");
  Cases out;
  for (std::size_t k = 0; k < opt.cases; ++k) {
    if (k == 0) {
      out.push_back(pair_case(product_2d(), 0, 1, {1.0, 1.0}, {0.0, 0.0}));
      continue;
    }
    const std::size_t n = mixed_dim(gen, k);
    const auto [i, j] = distinct_pair(gen.rng(), n);
    const Model f = symmetric_model(gen, n, i, j);
    const Box box = Box::cube(n, -1.0, 1.0);
    Vec x_bar = gen.point(box);
    Vec x_prime = gen.point(box);
    x_bar[j] = x_bar[i];
    x_prime[j] = x_prime[i];
    out.push_back(pair_case(f, i, j, x_bar, x_prime));
  }
  return out;
}

Cases strong_symmetry_cases(CaseGenerator& gen, const CheckOptions& opt) {
  require_pairs(gen, "strong-symmetry");
  Cases out;
  if (!opt.endpoint_pairs.empty()) {
    for (const auto& [x_bar, x_prime] : opt.endpoint_pairs) {
      if (x_bar.size() != 2 || x_prime.size() != 2) throw InvalidConfig("designated endpoint pairs have two inputs");
    }
    for (std::size_t k = 0; k < opt.cases; ++k) {
      const auto& [x_bar, x_prime] = opt.endpoint_pairs[k % opt.endpoint_pairs.size()];
      const Model f = k == 0 ? product_2d() : symmetric_model(gen, 2, 0, 1);
      out.push_back(pair_case(f, 0, 1, x_bar, x_prime));
    }
    return out;
  }
  for (std::size_t k = 0; k < opt.cases; ++k) {
    if (k == 0) {
      out.push_back(pair_case(product_2d(), 0, 1, {2.0, 1.0}, {1.0, 0.0}));
      continue;
    }
    const std::size_t n = mixed_dim(gen, k);
    const auto [i, j] = distinct_pair(gen.rng(), n);
    const Model f = symmetric_model(gen, n, i, j);
    const Box box = Box::cube(n, -1.0, 1.0);
    const Vec x_bar = gen.point(box);
    const Vec x_prime = gen.point(box);
    out.push_back(pair_case(f, i, j, x_bar, x_prime));
  }
  return out;
}

Cases asi_cases(CaseGenerator& gen, const CheckOptions& opt) {
  Cases out;
  const std::size_t n = gen.dim();
  Rng& rng = gen.rng();
  for (std::size_t k = 0; k < opt.cases; ++k) {
    Vec scale(n, 1.0);
    Vec shift(n, 0.0);
    if (k > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        scale[i] = rng.sign() * rng.uniform(0.5, 2.0);
        shift[i] = rng.uniform(-1.0, 1.0);
      }
    }
    Json c = endpoints_case(gen.model(n, true), gen.point(), gen.point());
    c["scale"] = scale;
    c["shift"] = shift;
    out.push_back(std::move(c));
  }
  return out;
}

Cases proportionality_cases(CaseGenerator& gen, const CheckOptions& opt) {
  Cases out;
  Rng& rng = gen.rng();
  for (std::size_t k = 0; k < opt.cases; ++k) {
    if (k == 0) {
      const AnalyticExpr s = var(0) + var(1);
      out.push_back({{"model", model_to_json(Model(AnalyticExpr::power(s, 3), 2))}, {"x_bar", Vec{1.0, 2.0}}});
      continue;
    }
    const std::size_t n = gen.dim();
    std::vector<AnalyticExpr> terms;
    for (std::size_t i = 0; i < n; ++i) terms.push_back(var(i));
    const AnalyticExpr s = AnalyticExpr::sum(std::move(terms));
    const AnalyticExpr g = AnalyticExpr::sum({rng.uniform(-1.0, 1.0) * AnalyticExpr::power(s, 2),
                                              rng.uniform(-1.0, 1.0) * AnalyticExpr::power(s, 3),
                                              rng.uniform(-1.0, 1.0) * AnalyticExpr::sin(s),
                                              rng.uniform(-1.0, 1.0) * AnalyticExpr::exp(0.5 * s)});
    Vec x_bar(n);
    const double common = rng.sign() * rng.uniform(0.2, 1.0);
    for (std::size_t i = 0; i < n; ++i) x_bar[i] = k % 5 == 1 ? common : rng.sign() * rng.uniform(0.2, 1.0);
    out.push_back({{"model", model_to_json(Model(g, n))}, {"x_bar", x_bar}});
  }
  return out;
}

Json monotonicity_case(const Model& f, const Model& g, std::size_t i, std::size_t j, const Vec& x_bar,
                       const Vec& x_prime) {
  return {{"f", model_to_json(f)}, {"g", model_to_json(g)}, {"i", i},
          {"j", j},                {"x_bar", x_bar},         {"x_prime", x_prime}};
}

/// Endpoints for a (F, G) pair: both selected inputs move by at least 0.2,
/// except in null cases where x_bar_i = x'_i.
std::pair<Vec, Vec> monotonicity_endpoints(CaseGenerator& gen, std::size_t k, std::size_t i, std::size_t j) {
  const Vec x_prime = gen.point();
  Vec x_bar = gen.point_away(x_prime, {i, j}, 0.2);
  if (k % 5 == 4) x_bar[i] = x_prime[i];
  return {x_bar, x_prime};
}

// dF/dx_i <= dG/dx_j everywhere: each monomial term c x^m of F is matched
// by c m_i / (m_j + 1) x^(m - e_i + e_j) in G, and G adds a non-decreasing
// function of x_j plus terms free of x_j.
Cases symmetric_monotonicity_cases(CaseGenerator& gen, const CheckOptions& opt) {
  require_pairs(gen, "symmetric-monotonicity");
  Cases out;
  const std::size_t n = gen.dim();
  Rng& rng = gen.rng();
  for (std::size_t k = 0; k < opt.cases; ++k) {
    if (k == 0) {
      const Model f(var(0) * AnalyticExpr::power(var(1), 2), 2);
      const Model g((1.0 / 3.0) * AnalyticExpr::power(var(1), 3), 2);
      out.push_back(monotonicity_case(f, g, 0, 1, {1.0, 1.0}, {0.0, 0.0}));
      continue;
    }
    const auto [i, j] = distinct_pair(rng, n);
    const Vec zero(n, 0.0);
    std::vector<AnalyticExpr> f_parts;
    std::vector<AnalyticExpr> g_parts;
    const std::size_t terms = 1 + rng.index(4);
    for (std::size_t t = 0; t < terms; ++t) {
      std::vector<unsigned> e = gen.multi_index(n, 4).exponents();
      if (e[i] == 0) ++e[i];
      const double c = rng.uniform(-2.0, 2.0);
      f_parts.push_back(c * monomial(MultiIndex(e), zero));
      const double ratio = static_cast<double>(e[i]) / static_cast<double>(e[j] + 1);
      --e[i];
      ++e[j];
      g_parts.push_back((c * ratio) * monomial(MultiIndex(e), zero));
    }
    const auto not_i = others(n, {i});
    const auto not_j = others(n, {j});
    f_parts.push_back(rng.uniform(-1.0, 1.0) * AnalyticExpr::sin(ridge_over(rng, not_i, 1.5)));
    g_parts.push_back(rng.uniform(-1.0, 1.0) * AnalyticExpr::exp(ridge_over(rng, not_j)));
    if (!rng.coin(0.3)) {
      g_parts.push_back(rng.uniform(0.0, 0.5) * var(j));
      g_parts.push_back(rng.uniform(0.0, 0.5) * AnalyticExpr::power(var(j), 3));
    }
    const Model f(AnalyticExpr::sum(std::move(f_parts)), n);
    const Model g(AnalyticExpr::sum(std::move(g_parts)), n);
    const auto [x_bar, x_prime] = monotonicity_endpoints(gen, k, i, j);
    out.push_back(monotonicity_case(f, g, i, j, x_bar, x_prime));
  }
  return out;
}

/// max(w . x + b, 0) with weight `lead` on input `at` and random weights
/// elsewhere.
MaxExpr relu_ridge(Rng& rng, std::size_t n, std::size_t at, double lead) {
  std::vector<double> w(n);
  std::vector<MaxExpr> args;
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = k == at ? lead : rng.uniform(-1.0, 1.0);
    args.push_back(MaxExpr::input(k));
  }
  return MaxExpr::max({MaxExpr::affine(std::move(w), std::move(args), rng.uniform(-0.5, 0.5)), MaxExpr::constant(0.0)});
}

/// relu network with the given affine-plus-relu-sum form.
Model relu_sum(std::size_t n, std::size_t lin_at, double lin, std::vector<std::pair<double, MaxExpr>> units) {
  std::vector<double> w{lin};
  std::vector<MaxExpr> args{MaxExpr::input(lin_at)};
  for (auto& [c, u] : units) {
    w.push_back(c);
    args.push_back(std::move(u));
  }
  return Model(rewrite_max_to_relu(MaxExpr::affine(std::move(w), std::move(args), 0.0), n));
}

/// Largest secant of F along e_i minus the smallest secant of G along e_j on
/// the grid; <= 0 when the pair satisfies the secant hypothesis.
double secant_gap(const Model& f, const Model& g, std::size_t i, std::size_t j, const Vec& x_bar, const Vec& x_prime,
                  const CheckOptions& opt) {
  double gap = -std::numeric_limits<double>::infinity();
  const std::size_t points = std::max<std::size_t>(opt.secant_grid, 2);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(points - 1);
    Vec x(x_bar.size());
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = x_prime[d] + t * (x_bar[d] - x_prime[d]);
    for (double z : {-opt.secant_eps, -0.5 * opt.secant_eps, 0.5 * opt.secant_eps, opt.secant_eps}) {
      Vec xi = x;
      Vec xj = x;
      xi[i] += z;
      xj[j] += z;
      const double sf = (f.value_at(xi) - f.value_at(x)) / z;
      const double sg = (g.value_at(xj) - g.value_at(x)) / z;
      gap = std::max(gap, sf - sg);
    }
  }
  return gap;
}

// F = a0 x_i + sum a_k relu(w_k x_i + r_k(x)) has secants along e_i at most
// U = a0 + sum max(a_k w_k, 0); G = (U + eps) x_j + sum c_k relu(...) with
// c_k >= 0 has secants along e_j at least U + eps.
Cases c0_symmetric_monotonicity_cases(CaseGenerator& gen, const CheckOptions& opt, std::size_t& rejected) {
  require_pairs(gen, "c0-symmetric-monotonicity");
  Cases out;
  const std::size_t n = gen.dim();
  Rng& rng = gen.rng();
  rejected = 0;
  for (std::size_t k = 0; k < opt.cases; ++k) {
    const auto [i, j] = distinct_pair(rng, n);
    const double a0 = rng.uniform(-1.0, 1.0);
    double upper = a0;
    std::vector<std::pair<double, MaxExpr>> f_units;
    const std::size_t nf = 1 + rng.index(3);
    for (std::size_t u = 0; u < nf; ++u) {
      const double a = rng.uniform(-1.0, 1.0);
      const double w = rng.uniform(0.5, 1.5);
      upper += std::max(a * w, 0.0);
      f_units.emplace_back(a, relu_ridge(rng, n, i, w));
    }
    f_units.emplace_back(rng.uniform(-1.0, 1.0), relu_ridge(rng, n, i, 0.0));
    std::vector<std::pair<double, MaxExpr>> g_units;
    const std::size_t ng = rng.index(3);
    for (std::size_t u = 0; u < ng; ++u) g_units.emplace_back(rng.uniform(0.0, 1.0), relu_ridge(rng, n, j, rng.uniform(0.5, 1.5)));
    g_units.emplace_back(rng.uniform(-1.0, 1.0), relu_ridge(rng, n, j, 0.0));
    const double eps = rng.coin(0.3) ? 0.0 : rng.uniform(0.0, 0.5);
    const Model f = relu_sum(n, i, a0, std::move(f_units));
    const Model g = relu_sum(n, j, upper + eps, std::move(g_units));
    const auto [x_bar, x_prime] = monotonicity_endpoints(gen, k, i, j);
    if (secant_gap(f, g, i, j, x_bar, x_prime, opt) > 1e-9) {
      ++rejected;
      continue;
    }
    out.push_back(monotonicity_case(f, g, i, j, x_bar, x_prime));
  }
  return out;
}

Cases implementation_invariance_cases(CaseGenerator& gen, const CheckOptions& opt) {
  Cases out;
  const std::size_t n = gen.dim();
  for (std::size_t k = 0; k < opt.cases; ++k) {
    if (k == 0) {
      const MaxExpr m = MaxExpr::max({MaxExpr::input(0), MaxExpr::input(1)});
      out.push_back({{"impl_a", model_to_json(Model(m, 2))},
                     {"impl_b", model_to_json(Model(rewrite_max_to_relu(m, 2)))},
                     {"x_bar", Vec{2.0, 1.0}},
                     {"x_prime", Vec{0.0, 0.0}}});
      continue;
    }
    Json c{{"x_bar", gen.point()}, {"x_prime", gen.point()}};
    if (k % 2 == 1) {
      const MaxExpr m = gen.max_tree(n);
      c["impl_a"] = model_to_json(Model(m, n));
      c["impl_b"] = model_to_json(Model(rewrite_max_to_relu(m, n)));
    } else {
      const LayeredNet net = gen.tanh_net(n, {4, 3});
      c["impl_a"] = model_to_json(Model(net));
      c["impl_b"] = model_to_json(Model(to_expression(net), n));
    }
    out.push_back(std::move(c));
  }
  return out;
}

Cases monomial_cases(CaseGenerator& gen, const CheckOptions& opt) {
  Cases out;
  for (std::size_t k = 0; k < opt.cases; ++k) {
    MultiIndex m;
    Vec x_bar;
    Vec x_prime;
    if (k == 0) {
      m = MultiIndex({2, 1});
      x_bar = {1.0, 1.0};
      x_prime = {0.0, 0.0};
    } else {
      const std::size_t n = gen.dim();
      m = k % 10 == 9 ? MultiIndex(std::vector<unsigned>(n, 0)) : gen.multi_index(n, 5);
      x_bar = gen.point();
      x_prime = gen.point();
    }
    const Json model{{"dim", m.dim()}, {"monomial", {{"exponents", m.exponents()}, {"center", x_prime}}}};
    out.push_back({{"model", model}, {"x_bar", x_bar}, {"x_prime", x_prime}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Violations.

double completeness_violation(const Method& method, const Json& c) {
  const Model f = model_at(c, "model");
  const Vec x_bar = vec_at(c, "x_bar");
  const Vec x_prime = vec_at(c, "x_prime");
  const Vec a = values_of(method, f, x_bar, x_prime);
  return std::abs(sum(a) - (eval(f, x_bar) - eval(f, x_prime)));
}

double linearity_violation(const Method& method, const Json& c) {
  const Model f = model_at(c, "f");
  const Model g = model_at(c, "g");
  const double alpha = c.at("alpha").get<double>();
  const double beta = c.at("beta").get<double>();
  const Vec x_bar = vec_at(c, "x_bar");
  const Vec x_prime = vec_at(c, "x_prime");
  const Model h = Model::combination({{alpha, f}, {beta, g}});
  const Vec af = values_of(method, f, x_bar, x_prime);
  const Vec ag = values_of(method, g, x_bar, x_prime);
  const Vec ah = values_of(method, h, x_bar, x_prime);
  double v = 0.0;
  for (std::size_t i = 0; i < ah.size(); ++i) v = std::max(v, std::abs(ah[i] - (alpha * af[i] + beta * ag[i])));
  return v;
}

double dummy_violation(const Method& method, const Json& c) {
  const Model f = model_at(c, "model");
  const Vec a = values_of(method, f, vec_at(c, "x_bar"), vec_at(c, "x_prime"));
  double v = 0.0;
  for (std::size_t i : c.at("dummies").get<std::vector<std::size_t>>()) v = std::max(v, std::abs(a.at(i)));
  return v;
}

double ndp_violation(const Method& method, const Json& c) {
  const Vec a = values_of(method, model_at(c, "model"), vec_at(c, "x_bar"), vec_at(c, "x_prime"));
  double v = 0.0;
  for (double x : a) v = std::max(v, -x);
  return v;
}

double symmetry_violation(const Method& method, const Json& c) {
  const Vec a = values_of(method, model_at(c, "model"), vec_at(c, "x_bar"), vec_at(c, "x_prime"));
  return std::abs(a.at(index_at(c, "i")) - a.at(index_at(c, "j")));
}

double strong_symmetry_violation(const Method& method, const Json& c) {
  const Model f = model_at(c, "model");
  const std::size_t i = index_at(c, "i");
  const std::size_t j = index_at(c, "j");
  Vec x_bar = vec_at(c, "x_bar");
  Vec x_prime = vec_at(c, "x_prime");
  const Vec a = values_of(method, f, x_bar, x_prime);
  std::swap(x_bar.at(i), x_bar.at(j));
  std::swap(x_prime.at(i), x_prime.at(j));
  const Vec b = values_of(method, f, x_bar, x_prime);
  double v = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const std::size_t swapped = k == i ? j : (k == j ? i : k);
    v = std::max(v, std::abs(a[k] - b[swapped]));
  }
  return v;
}

double asi_violation(const Method& method, const Json& c) {
  const Model f = model_at(c, "model");
  const Vec scale = vec_at(c, "scale");
  const Vec shift = vec_at(c, "shift");
  const Vec x_bar = vec_at(c, "x_bar");
  const Vec x_prime = vec_at(c, "x_prime");
  const std::size_t n = f.dim();
  if (scale.size() != n || shift.size() != n) throw DimensionMismatch("transform does not match the model");
  Matrix inverse(n, n);
  Vec offset(n);
  Vec t_bar(n);
  Vec t_prime(n);
  for (std::size_t i = 0; i < n; ++i) {
    inverse(i, i) = 1.0 / scale[i];
    offset[i] = -shift[i] / scale[i];
    t_bar[i] = scale[i] * x_bar[i] + shift[i];
    t_prime[i] = scale[i] * x_prime[i] + shift[i];
  }
  const Model g = Model::composed(f, std::move(inverse), std::move(offset), Box::unbounded(n));
  const Vec a = values_of(method, f, x_bar, x_prime);
  const Vec b = values_of(method, g, t_bar, t_prime);
  return max_abs_diff(a, b);
}

double proportionality_violation(const Method& method, const Json& c) {
  const Model f = model_at(c, "model");
  const Vec x_bar = vec_at(c, "x_bar");
  const Vec a = values_of(method, f, x_bar, Vec(x_bar.size(), 0.0));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (x_bar[i] == 0.0) continue;
    lo = std::min(lo, a[i] / x_bar[i]);
    hi = std::max(hi, a[i] / x_bar[i]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

double monotonicity_violation(const Method& method, const Json& c) {
  const Model f = model_at(c, "f");
  const Model g = model_at(c, "g");
  const std::size_t i = index_at(c, "i");
  const std::size_t j = index_at(c, "j");
  const Vec x_bar = vec_at(c, "x_bar");
  const Vec x_prime = vec_at(c, "x_prime");
  const Vec af = values_of(method, f, x_bar, x_prime);
  const double di = x_bar.at(i) - x_prime.at(i);
  if (di == 0.0) return std::abs(af.at(i));
  const double dj = x_bar.at(j) - x_prime.at(j);
  if (dj == 0.0) return 0.0;
  const Vec ag = values_of(method, g, x_bar, x_prime);
  return std::max(0.0, af.at(i) / di - ag.at(j) / dj);
}

double invariance_violation(const Method& method, const Json& c) {
  const Vec x_bar = vec_at(c, "x_bar");
  const Vec x_prime = vec_at(c, "x_prime");
  const Vec a = values_of(method, model_at(c, "impl_a"), x_bar, x_prime);
  const Vec b = values_of(method, model_at(c, "impl_b"), x_bar, x_prime);
  return max_abs_diff(a, b);
}

double monomial_violation(const Method& method, const Json& c) {
  const Model f = model_at(c, "model");
  const Vec x_bar = vec_at(c, "x_bar");
  const Vec x_prime = vec_at(c, "x_prime");
  const MultiIndex m(c.at("model").at("monomial").at("exponents").get<std::vector<unsigned>>());
  const Vec a = values_of(method, f, x_bar, x_prime);
  return max_abs_diff(a, ig_monomial_closed_form(m, x_bar, x_prime).values);
}

// ---------------------------------------------------------------------------

struct CaseOutcome {
  bool applicable = false;
  double violation = 0.0;
};

CaseOutcome run_case(Axiom axiom, const Method& method, const Json& c) {
  try {
    return {true, case_violation(axiom, method, c)};
  } catch (const MethodUndefined&) {
  } catch (const NondifferentiablePath&) {
  } catch (const QuadratureDiverged&) {
  } catch (const WrongDimension&) {
  } catch (const TooManyInputs&) {
  }
  return {};
}

std::vector<CaseOutcome> run_cases(Axiom axiom, const Method& method, const Cases& cases, std::size_t threads) {
  std::vector<CaseOutcome> out(cases.size());
  std::vector<std::exception_ptr> errors(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cases.size(); k = next++) {
      try {
        out[k] = run_case(axiom, method, cases[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::min(std::max<std::size_t>(threads, 1), std::max<std::size_t>(cases.size(), 1));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

AxiomReport evaluate(Axiom axiom, const Method& method, const Cases& cases, std::uint64_t seed, double tol,
                     std::size_t threads, std::string note) {
  AxiomReport r;
  r.axiom = std::string(axiom_id(axiom));
  r.cases = cases.size();
  r.seed = seed;
  r.note = std::move(note);
  r.witness = nullptr;
  const auto outcomes = run_cases(axiom, method, cases, threads);
  std::optional<std::size_t> worst;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (!outcomes[k].applicable) {
      ++r.inapplicable;
      continue;
    }
    const double v = std::isnan(outcomes[k].violation) ? std::numeric_limits<double>::infinity() : outcomes[k].violation;
    if (!worst || v > r.worst) {
      worst = k;
      r.worst = v;
    }
  }
  if (!worst) {
    r.verdict = Verdict::kInapplicable;
    return r;
  }
  r.verdict = r.worst > tol ? Verdict::kFail : Verdict::kPass;
  r.witness = cases[*worst];
  r.witness["violation"] = r.worst;
  return r;
}

std::size_t thread_count(const CheckOptions& opt) {
  if (opt.threads > 0) return opt.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

Attribution with_values(std::string method, Vec values, const Model& f, VecView x_bar, VecView x_prime) {
  Attribution a;
  a.method = std::move(method);
  a.values = std::move(values);
  a.residual = sum(a.values) - (f.value_at(x_bar) - f.value_at(x_prime));
  return a;
}

bool same_point(VecView a, std::initializer_list<double> b) { return std::equal(a.begin(), a.end(), b.begin(), b.end()); }

}  // namespace

std::string_view axiom_id(Axiom a) noexcept { return kAxiomIds[static_cast<std::size_t>(a)]; }

std::optional<Axiom> axiom_from_id(std::string_view id) noexcept {
  for (std::size_t k = 0; k < kAxiomIds.size(); ++k) {
    if (kAxiomIds[k] == id) return static_cast<Axiom>(k);
  }
  return std::nullopt;
}

const std::vector<Axiom>& all_axioms() {
  static const std::vector<Axiom> all = [] {
    std::vector<Axiom> v;
    for (std::size_t k = 0; k < kAxiomIds.size(); ++k) v.push_back(static_cast<Axiom>(k));
    return v;
  }();
  return all;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInapplicable: return "inapplicable";
  }
  return "inapplicable";
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "pass") return Verdict::kPass;
  if (s == "fail") return Verdict::kFail;
  if (s == "inapplicable") return Verdict::kInapplicable;
  throw InvalidConfig("unknown verdict '" + std::string(s) + "'");
}

Json report_to_json(const AxiomReport& r) {
  Json j{{"axiom", r.axiom},
         {"verdict", to_string(r.verdict)},
         {"worst", r.worst},
         {"witness", r.witness},
         {"cases", r.cases},
         {"inapplicable", r.inapplicable},
         {"seed", r.seed}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

AxiomReport report_from_json(const Json& j) {
  try {
    AxiomReport r;
    r.axiom = j.at("axiom").get<std::string>();
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.worst = j.at("worst").is_null() ? std::numeric_limits<double>::infinity() : j.at("worst").get<double>();
    r.witness = j.at("witness");
    r.cases = j.at("cases").get<std::size_t>();
    r.inapplicable = j.value("inapplicable", std::size_t{0});
    r.seed = j.at("seed").get<std::uint64_t>();
    r.note = j.value("note", std::string{});
    return r;
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("malformed axiom report: ") + e.what());
  }
}

std::string report_csv_header() { return "method,axiom,verdict,worst,cases,inapplicable,seed"; }

std::string report_csv_row(std::string_view method, const AxiomReport& r) {
  return std::string(method) + "," + r.axiom + "," + std::string(to_string(r.verdict)) + "," + format_double(r.worst) +
         "," + std::to_string(r.cases) + "," + std::to_string(r.inapplicable) + "," + std::to_string(r.seed);
}

double case_violation(Axiom axiom, const Method& method, const Json& c) {
  try {
    switch (axiom) {
      case Axiom::kCompleteness: return completeness_violation(method, c);
      case Axiom::kLinearity: return linearity_violation(method, c);
      case Axiom::kDummy: return dummy_violation(method, c);
      case Axiom::kNdp: return ndp_violation(method, c);
      case Axiom::kSymmetryPreserving: return symmetry_violation(method, c);
      case Axiom::kStrongSymmetry: return strong_symmetry_violation(method, c);
      case Axiom::kAsi: return asi_violation(method, c);
      case Axiom::kProportionality: return proportionality_violation(method, c);
      case Axiom::kSymmetricMonotonicity:
      case Axiom::kC0SymmetricMonotonicity: return monotonicity_violation(method, c);
      case Axiom::kImplementationInvariance: return invariance_violation(method, c);
      case Axiom::kMonomialDistribution: return monomial_violation(method, c);
    }
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("malformed case: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw InvalidConfig(std::string("case index out of range: ") + e.what());
  }
  throw InvalidConfig("unknown axiom");
}

double replay(const AxiomReport& report, const Method& method) {
  const auto axiom = axiom_from_id(report.axiom);
  if (!axiom) throw InvalidConfig("unknown axiom '" + report.axiom + "'");
  if (report.witness.is_null()) throw InvalidConfig("report has no witness");
  return case_violation(*axiom, method, report.witness);
}

namespace {

AxiomReport finish(Axiom axiom, const Method& method, const Cases& cases, const CaseGenerator& gen,
                   const CheckOptions& opt, std::string note = {}) {
  return evaluate(axiom, method, cases, gen.seed(), opt.tol, thread_count(opt), std::move(note));
}

}  // namespace

AxiomReport check_completeness(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kCompleteness, method, completeness_cases(gen, opt), gen, opt);
}

AxiomReport check_linearity(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kLinearity, method, linearity_cases(gen, opt), gen, opt);
}

AxiomReport check_dummy(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kDummy, method, dummy_cases(gen, opt), gen, opt);
}

AxiomReport check_ndp(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kNdp, method, ndp_cases(gen, opt), gen, opt, std::string(kByConstruction));
}

AxiomReport check_symmetry_preserving(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kSymmetryPreserving, method, symmetry_cases(gen, opt), gen, opt,
                std::string(kByConstruction));
}

AxiomReport check_strong_symmetry(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kStrongSymmetry, method, strong_symmetry_cases(gen, opt), gen, opt,
                std::string(kByConstruction));
}

AxiomReport check_asi(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kAsi, method, asi_cases(gen, opt), gen, opt);
}

AxiomReport check_proportionality(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kProportionality, method, proportionality_cases(gen, opt), gen, opt);
}

AxiomReport check_symmetric_monotonicity(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kSymmetricMonotonicity, method, symmetric_monotonicity_cases(gen, opt), gen, opt,
                std::string(kByConstruction));
}

AxiomReport check_c0_symmetric_monotonicity(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  std::size_t rejected = 0;
  Cases cases = c0_symmetric_monotonicity_cases(gen, opt, rejected);
  std::string note = std::string(kByConstruction) + "; secant dominance verified on " +
                     std::to_string(opt.secant_grid) + " points with eps " + format_double(opt.secant_eps);
  if (rejected > 0) note += "; " + std::to_string(rejected) + " pairs failed the grid check and were skipped";
  return finish(Axiom::kC0SymmetricMonotonicity, method, cases, gen, opt, std::move(note));
}

AxiomReport check_implementation_invariance(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kImplementationInvariance, method, implementation_invariance_cases(gen, opt), gen, opt);
}

AxiomReport check_monomial_distribution(const Method& method, CaseGenerator gen, const CheckOptions& opt) {
  return finish(Axiom::kMonomialDistribution, method, monomial_cases(gen, opt), gen, opt);
}

AxiomReport check_axiom(Axiom axiom, const Method& method, const CheckOptions& opt) {
  CaseGenerator gen(derive_seed(opt.seed, static_cast<std::uint64_t>(axiom)), opt.dim);
  AxiomReport r = [&] {
    switch (axiom) {
      case Axiom::kCompleteness: return check_completeness(method, gen, opt);
      case Axiom::kLinearity: return check_linearity(method, gen, opt);
      case Axiom::kDummy: return check_dummy(method, gen, opt);
      case Axiom::kNdp: return check_ndp(method, gen, opt);
      case Axiom::kSymmetryPreserving: return check_symmetry_preserving(method, gen, opt);
      case Axiom::kStrongSymmetry: return check_strong_symmetry(method, gen, opt);
      case Axiom::kAsi: return check_asi(method, gen, opt);
      case Axiom::kProportionality: return check_proportionality(method, gen, opt);
      case Axiom::kSymmetricMonotonicity: return check_symmetric_monotonicity(method, gen, opt);
      case Axiom::kC0SymmetricMonotonicity: return check_c0_symmetric_monotonicity(method, gen, opt);
      case Axiom::kImplementationInvariance: return check_implementation_invariance(method, gen, opt);
      case Axiom::kMonomialDistribution: return check_monomial_distribution(method, gen, opt);
    }
    throw InvalidConfig("unknown axiom");
  }();
  r.seed = opt.seed;
  return r;
}

Attribution paired_lshape(const Model& f, VecView x_bar, VecView x_prime, const QuadratureConfig& q) {
  if (same_point(x_bar, {2.0, 1.0}) && same_point(x_prime, {1.0, 0.0})) {
    return path_attribution(f, PathSpec::lshape(LVariant::kXY), x_bar, x_prime, q);
  }
  if (same_point(x_bar, {1.0, 2.0}) && same_point(x_prime, {0.0, 1.0})) {
    return path_attribution(f, PathSpec::lshape(LVariant::kYX), x_bar, x_prime, q);
  }
  return ig(f, x_bar, x_prime, q);
}

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"ig",         "shapley",   "power-path",    "lshape-xy",
                                              "lshape-yx",  "paired-lshape", "half-ig",   "ig-squared",
                                              "uniform-split", "negated-ig", "layer-count"};
  return names;
}

Method method_by_name(std::string_view name, const QuadratureConfig& q) {
  q.validate();
  if (name == "ig") return [q](const Model& f, VecView b, VecView p) { return ig(f, b, p, q); };
  if (name == "shapley") return [](const Model& f, VecView b, VecView p) { return shapley(f, b, p); };
  if (name == "power-path") {
    return [q](const Model& f, VecView b, VecView p) { return path_attribution(f, PathSpec::power(), b, p, q); };
  }
  if (name == "lshape-xy" || name == "lshape-yx") {
    const LVariant v = name == "lshape-xy" ? LVariant::kXY : LVariant::kYX;
    return [q, v](const Model& f, VecView b, VecView p) { return path_attribution(f, PathSpec::lshape(v), b, p, q); };
  }
  if (name == "paired-lshape") {
    return [q](const Model& f, VecView b, VecView p) { return paired_lshape(f, b, p, q); };
  }
  if (name == "half-ig") {
    return [q](const Model& f, VecView b, VecView p) {
      Vec v = ig(f, b, p, q).values;
      for (double& x : v) x *= 0.5;
      return with_values("half-ig", std::move(v), f, b, p);
    };
  }
  if (name == "ig-squared") {
    return [q](const Model& f, VecView b, VecView p) {
      Vec v = ig(f, b, p, q).values;
      for (double& x : v) x *= x;
      return with_values("ig-squared", std::move(v), f, b, p);
    };
  }
  if (name == "uniform-split") {
    return [](const Model& f, VecView b, VecView p) {
      const double share = (f.value_at(b) - f.value_at(p)) / static_cast<double>(f.dim());
      return with_values("uniform-split", Vec(f.dim(), share), f, b, p);
    };
  }
  if (name == "negated-ig") {
    return [q](const Model& f, VecView b, VecView p) {
      Vec v = ig(f, b, p, q).values;
      for (double& x : v) x = -x;
      return with_values("negated-ig", std::move(v), f, b, p);
    };
  }
  if (name == "layer-count") {
    return [q](const Model& f, VecView b, VecView p) {
      Vec v = ig(f, b, p, q).values;
      for (double& x : v) x += 1e-3 * static_cast<double>(f.layer_count());
      return with_values("layer-count", std::move(v), f, b, p);
    };
  }
  throw InvalidConfig("unknown method '" + std::string(name) + "'");
}

}  // namespace axiograd
