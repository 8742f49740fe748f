// Runs acceptance criteria 1-10 and prints one PASS/FAIL line for each.

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <axiograd/approx.hpp>
#include <axiograd/attribution.hpp>
#include <axiograd/axioms.hpp>
#include <axiograd/cases.hpp>
#include <axiograd/errors.hpp>
#include <axiograd/grad.hpp>
#include <axiograd/io.hpp>

#include "oracles.hpp"

namespace {

using namespace axiograd;
using E = AnalyticExpr;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double ulp(double v) {
  const double a = std::abs(v);
  return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

Outcome monomial_closed_form() {
  CaseGenerator gen(101, 4, Box::cube(4, -0.75, 0.75));
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    for (const auto& m : testing::multi_indices(n, 8)) {
      Vec xb = gen.point();
      Vec xp = gen.point();
      xb.resize(n);
      xp.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(xb[i] - xp[i]) < 0.1) xb[i] = xp[i] + (xb[i] >= xp[i] ? 0.1 : -0.1);
      }
      const Vec q = ig(Model(monomial(MultiIndex(m), xp), n), xb, xp).values;
      const Vec c = ig_monomial_closed_form(MultiIndex(m), xb, xp).values;
      const Vec oracle = testing::monomial_ig(m, xb, xp);
      const double scale = std::max(max_abs(oracle), std::numeric_limits<double>::min());
      worst = std::max({worst, max_abs_diff(q, oracle) / scale, max_abs_diff(c, oracle) / scale});
      ++checked;
    }
  }
  const Vec big = ig_monomial_closed_form(MultiIndex({100, 1}), Vec{2.0, 2.0}, Vec{0.0, 0.0}).values;
  const double two101 = std::ldexp(1.0, 101);
  const bool exact = big[0] == 100.0 / 101.0 * two101 && big[1] == two101 / 101.0;
  return {worst <= 1e-8 && exact, std::to_string(checked) + " multi-indices, worst relative error " + num(worst) +
                                      ", (100,1) closed form " + (exact ? "exact" : "mismatch")};
}

Outcome shapley_contrast() {
  const Model f(monomial(MultiIndex({100, 1}), Vec{0.0, 0.0}), 2);
  const Vec s = shapley(f, Vec{2.0, 2.0}, Vec{0.0, 0.0}).values;
  const Vec g = ig_monomial_closed_form(MultiIndex({100, 1}), Vec{2.0, 2.0}, Vec{0.0, 0.0}).values;
  const double half = std::ldexp(1.0, 100);
  const bool equal_split = s[0] == half && s[1] == half;
  const double gap = max_abs_diff(s, g) / half;
  return {equal_split && gap > 0.5,
          std::string("shapley ") + (equal_split ? "(2^100, 2^100)" : "not an equal split") +
              ", relative gap to ig " + num(gap)};
}

Outcome axiom_soundness() {
  CheckOptions opt;
  opt.seed = 42;
  opt.cases = 200;
  opt.tol = 1e-6;
  const Method m = method_by_name("ig");
  std::string failed;
  double worst = 0.0;
  for (Axiom a : all_axioms()) {
    if (a == Axiom::kImplementationInvariance) continue;
    const AxiomReport r = check_axiom(a, m, opt);
    worst = std::max(worst, r.worst);
    if (r.verdict != Verdict::kPass || r.cases != 200) failed += " " + r.axiom;
  }
  return {failed.empty(), failed.empty() ? "11 axioms pass over 200 cases each, worst " + num(worst)
                                         : "failing:" + failed};
}

Outcome power_path_non_uniqueness() {
  const Method power = method_by_name("power-path");
  const AxiomReport r = check_axiom(Axiom::kSymmetryPreserving, power);
  CaseGenerator gen(404, 2);
  std::size_t differing = 0;
  std::size_t total = 0;
  double largest = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Model f = gen.model(2, k % 2 == 0 ? ModelFamily::kPolynomial : ModelFamily::kAnalytic);
    const Vec xb = gen.point();
    const Vec xp = gen.point();
    if (std::abs((xb[0] - xp[0]) - (xb[1] - xp[1])) < 1e-3) continue;
    try {
      const double d = max_abs_diff(power(f, xb, xp).values, ig(f, xb, xp).values);
      largest = std::max(largest, d);
      if (d > 1e-3) ++differing;
      ++total;
    } catch (const QuadratureDiverged&) {
    }
  }
  const double anchor =
      max_abs_diff(power(Model(E::variable(0) * E::variable(1), 2), Vec{1.0, 0.5}, Vec{0.0, 0.0}).values,
                   ig(Model(E::variable(0) * E::variable(1), 2), Vec{1.0, 0.5}, Vec{0.0, 0.0}).values);
  const bool pass = r.verdict == Verdict::kPass && differing > 0 && anchor > 1e-3;
  return {pass, "symmetry-preserving " + std::string(to_string(r.verdict)) + " (worst " + num(r.worst) + "), " +
                    std::to_string(differing) + "/" + std::to_string(total) +
                    " asymmetric cases differ from ig by > 1e-3 (largest " + num(largest) + ")"};
}

Outcome paired_lshape_strong_symmetry() {
  CheckOptions opt;
  opt.endpoint_pairs = {{{2.0, 1.0}, {1.0, 0.0}}, {{1.0, 2.0}, {0.0, 1.0}}};
  const Method paired = method_by_name("paired-lshape");
  const AxiomReport r = check_axiom(Axiom::kStrongSymmetry, paired, opt);
  const E x = E::variable(0);
  const E y = E::variable(1);
  const std::vector<E> symmetric{x * y + E::sin(x + y), E::power(x + y, 3), E::exp(x) + E::exp(y),
                                 E::power(x, 2) * E::power(y, 2) + E::tanh(x * y)};
  double worst = 0.0;
  for (const E& e : symmetric) {
    const Model f(e, 2, Box::cube(2, 0.0, 2.0));
    const Vec a = paired(f, Vec{2.0, 1.0}, Vec{1.0, 0.0}).values;
    const Vec b = paired(f, Vec{1.0, 2.0}, Vec{0.0, 1.0}).values;
    const double target = eval(f, Vec{2.0, 0.0}) - eval(f, Vec{1.0, 0.0});
    worst = std::max({worst, std::abs(a[0] - target), std::abs(b[1] - target), std::abs(a[1] - b[0])});
  }
  return {r.verdict == Verdict::kPass && worst <= 1e-12,
          "strong symmetry " + std::string(to_string(r.verdict)) + " on designated pairs, |A_1 - (F(2,0) - F(1,0))| <= " +
              num(worst)};
}

Outcome max_pathology() {
  bool undefined = true;
  double worst = 0.0;
  for (const Model& f : {testing::max_net(), Model(testing::max2(), 2)}) {
    try {
      ig(f, Vec{1.0, 1.0}, Vec{0.0, 0.0});
      undefined = false;
    } catch (const NondifferentiablePath&) {
    }
    worst = std::max(worst, max_abs_diff(ig(f, Vec{2.0, 1.0}, Vec{0.0, 0.0}).values, Vec{2.0, 0.0}));
  }
  return {undefined && worst <= 1e-8, std::string("diagonal ") + (undefined ? "NondifferentiablePath" : "defined") +
                                          ", off-diagonal error " + num(worst)};
}

Outcome softplus_convergence() {
  const LayeredNet net = rewrite_max_to_relu(testing::max2(), 2);
  const Vec alphas{1.0, 10.0, 100.0, 1000.0};
  const ConvergenceSeries off = softplus_convergence_study(net, Vec{2.0, 1.0}, Vec{0.0, 0.0}, alphas);
  bool decreasing = off.reference.has_value() && max_abs_diff(*off.reference, Vec{2.0, 0.0}) <= 1e-8;
  for (std::size_t k = 1; k < off.deltas.size(); ++k) decreasing = decreasing && off.deltas[k] < off.deltas[k - 1];
  const ConvergenceSeries diag = softplus_convergence_study(net, Vec{1.0, 1.0}, Vec{0.0, 0.0}, alphas);
  const double cauchy = diag.deltas.back();
  const double to_half = max_abs_diff(diag.attributions.back().values, Vec{0.5, 0.5});
  const bool pass = decreasing && off.deltas.back() <= 1e-2 && !diag.reference && cauchy <= 1e-2 && to_half <= 1e-2;
  return {pass, std::string("off-diagonal deltas ") + (decreasing ? "decreasing" : "not decreasing") + ", final " +
                    num(off.deltas.back()) + "; diagonal Cauchy delta " + num(cauchy) + ", distance to (0.5,0.5) " +
                    num(to_half)};
}

Outcome taylor_continuity() {
  const ConvergenceSeries s =
      taylor_convergence_study(testing::exp_sum(), Vec{0.5, 0.5}, Vec{0.0, 0.0}, {1, 2, 3, 4, 5, 6, 7, 8});
  bool decreasing = true;
  for (std::size_t k = 1; k < s.deltas.size(); ++k) decreasing = decreasing && s.deltas[k] < s.deltas[k - 1];
  return {decreasing && s.deltas.back() <= 1e-6,
          std::string("deltas ") + (decreasing ? "decreasing" : "not decreasing") + ", delta at order 8 = " +
              num(s.deltas.back()) + " (limit 1e-6)"};
}

Outcome gradient_correctness() {
  double worst = 0.0;
  std::string worst_name;
  const auto models = testing::analytic_models();
  for (const auto& [name, f] : models) {
    const Box box = f.box().bounded() ? f.box() : Box::cube(f.dim(), -1.0, 1.0);
    double width = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < box.dim(); ++i) width = std::min(width, box.width(i));
    const double h = 1e-5 * width;
    Vec lo = box.lower();
    Vec hi = box.upper();
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] += 2.0 * h;
      hi[i] -= 2.0 * h;
    }
    CaseGenerator gen(909, f.dim(), Box(lo, hi));
    for (int k = 0; k < 1000; ++k) {
      const double d = fd_check(f, gen.point(), h);
      if (d > worst) {
        worst = d;
        worst_name = name;
      }
    }
  }
  return {worst <= 1e-6, std::to_string(models.size()) + " models x 1000 points, worst " + num(worst) + " (" +
                             worst_name + ")"};
}

Outcome completeness_residual() {
  CaseGenerator gen(1010, 3);
  double worst_ig = 0.0;
  double worst_shapley_ulps = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ModelFamily fam =
        k % 3 == 0 ? ModelFamily::kPolynomial : (k % 3 == 1 ? ModelFamily::kAnalytic : ModelFamily::kTanhNet);
    const Model f = gen.model(3, fam);
    const Vec xb = gen.point();
    const Vec xp = gen.point();
    worst_ig = std::max(worst_ig, std::abs(ig(f, xb, xp).residual));
    const double unit = ulp(std::max(std::abs(eval(f, xb)), std::abs(eval(f, xp))));
    worst_shapley_ulps = std::max(worst_shapley_ulps, std::abs(shapley(f, xb, xp).residual) / unit);
  }
  return {worst_ig <= 1e-10 && worst_shapley_ulps <= 16.0,
          "100 models, ig residual " + num(worst_ig) + ", shapley residual " + num(worst_shapley_ulps) + " ulp"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "monomial closed form", monomial_closed_form},
      {2, "shapley contrast", shapley_contrast},
      {3, "axiom soundness", axiom_soundness},
      {4, "power path non-uniqueness", power_path_non_uniqueness},
      {5, "paired L-path strong symmetry", paired_lshape_strong_symmetry},
      {6, "max pathology", max_pathology},
      {7, "softplus convergence", softplus_convergence},
      {8, "taylor continuity", taylor_continuity},
      {9, "gradient correctness", gradient_correctness},
      {10, "completeness residual", completeness_residual},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("raised: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
