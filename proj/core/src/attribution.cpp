#include "axiograd/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace axiograd {
namespace {

constexpr std::size_t kSignatureSamples = 256;
constexpr double kSnap = 1e-12;
constexpr double kMaxPowerWarp = 1e8;

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double sum_of(const Vec& v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value();
}

std::string path_tag(const PathSpec& p) {
  switch (p.kind()) {
    case PathKind::kStraight: return "path:straight";
    case PathKind::kPower: return "path:power";
    case PathKind::kPiecewiseLinear: return "path:piecewise_linear";
    case PathKind::kLShape: return p.variant() == LVariant::kXY ? "path:lshape-xy" : "path:lshape-yx";
    case PathKind::kEnsemble: return "ensemble";
  }
  return "path";
}

using Signature = std::vector<unsigned char>;

class BreakpointFinder {
 public:
  BreakpointFinder(const Model& f, const PathSpec& p) : f_(f), p_(p) {}

  Signature at(double t) const {
    Signature s;
    f_.signature_at(path_eval(p_, t), s);
    return s;
  }

  /// Parameters in (a, b) where the signature changes, ascending.
  std::vector<double> find(double a, double b) const {
    std::vector<double> out;
    Signature prev = at(a);
    double t_prev = a;
    for (std::size_t k = 1; k <= kSignatureSamples; ++k) {
      const double t = k == kSignatureSamples ? b : a + (b - a) * static_cast<double>(k) / kSignatureSamples;
      Signature cur = at(t);
      if (cur != prev) bisect(t_prev, prev, t, cur, out, 0);
      prev = std::move(cur);
      t_prev = t;
    }
    return out;
  }

 private:
  void bisect(double lo, const Signature& s_lo, double hi, const Signature& s_hi, std::vector<double>& out,
              int depth) const {
    double l = lo, h = hi;
    Signature s_h = s_hi;
    for (int it = 0; it < 200 && h - l > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(h));
         ++it) {
      const double mid = 0.5 * (l + h);
      if (mid <= l || mid >= h) break;
      Signature s_mid = at(mid);
      if (s_mid == s_lo) {
        l = mid;
      } else {
        h = mid;
        s_h = std::move(s_mid);
      }
    }
    out.push_back(0.5 * (l + h));
    // Further switches between h and hi.
    if (s_h != s_hi && depth < 64 && h < hi) bisect(h, s_h, hi, s_hi, out, depth + 1);
  }

  const Model& f_;
  const PathSpec& p_;
};

// Splits [a, b] at the located breakpoints; those within kSnap of an end
// turn into grading at that end.
void append_segments(double a, double b, bool grade_a, bool grade_b, std::vector<double> cuts,
                     std::vector<Segment>& out) {
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> pts{a};
  std::vector<bool> graded{grade_a};
  for (double c : cuts) {
    if (c - a <= kSnap) {
      graded.front() = true;
      continue;
    }
    if (b - c <= kSnap) {
      grade_b = true;
      continue;
    }
    if (c - pts.back() <= kSnap) continue;
    pts.push_back(c);
    graded.push_back(true);
  }
  pts.push_back(b);
  graded.push_back(grade_b);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) out.push_back({pts[k], pts[k + 1], graded[k], graded[k + 1]});
}

void check_waypoints(const Model& f, const PathSpec& p) {
  for (const auto& w : p.waypoints()) f.check_input(w);
}

}  // namespace

Attribution path_attribution(const Model& f, const PathSpec& path, VecView x_bar, VecView x_prime,
                             const QuadratureConfig& q) {
  if (path.kind() == PathKind::kEnsemble) return ensemble_attribution(f, path, x_bar, x_prime, q);
  q.validate();
  f.check_input(x_bar);
  f.check_input(x_prime);
  const std::size_t n = f.dim();
  const PathSpec p = path.bound(Vec(x_bar.begin(), x_bar.end()), Vec(x_prime.begin(), x_prime.end()));
  check_waypoints(f, p);

  // Power paths: substitute t = s^w so that the slowest coordinate moves
  // linearly near s = 0.
  PathSpec ip = p;
  bool grade_ends = false;
  if (p.kind() == PathKind::kPower) {
    double min_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x_bar[i] - x_prime[i];
      if (d != 0.0) min_sq = std::min(min_sq, d * d * p.warp());
    }
    if (std::isfinite(min_sq) && min_sq < 1.0) ip = p.warped(std::min(1.0 / min_sq, kMaxPowerWarp));
    grade_ends = true;
  } else if (p.warp() != 1.0) {
    grade_ends = true;
  }

  std::vector<double> knots{0.0};
  for (double b : ip.breakpoints()) knots.push_back(b);
  knots.push_back(1.0);

  std::vector<Segment> segments;
  const BreakpointFinder finder(f, ip);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    std::vector<double> cuts;
    if (f.piecewise()) cuts = finder.find(knots[k], knots[k + 1]);
    append_segments(knots[k], knots[k + 1], grade_ends && k == 0, grade_ends && k + 2 == knots.size(),
                    std::move(cuts), segments);
  }

  std::size_t flagged = 0;
  Vec g;
  std::vector<KinkUnit> kinks;
  auto integrand = [&](double t, Vec& out) {
    double s = t;
    Vec x = path_eval(ip, s);
    kinks.clear();
    f.gradient_at(x, g, kinks);
    for (double shift : {kJitterStep, -kJitterStep}) {
      if (kinks.empty()) break;
      const double moved = t + shift;
      if (moved <= 0.0 || moved >= 1.0) continue;
      s = moved;
      x = path_eval(ip, s);
      kinks.clear();
      f.gradient_at(x, g, kinks);
    }
    if (!kinks.empty()) ++flagged;
    const Vec d = path_deriv(ip, s);
    for (std::size_t i = 0; i < n; ++i) out[i] = d[i] == 0.0 ? 0.0 : g[i] * d[i];
  };

  auto check_flagged = [&](std::size_t evaluations) {
    if (evaluations == 0) return;
    const double fraction = static_cast<double>(flagged) / static_cast<double>(evaluations);
    if (fraction > kFlaggedFractionLimit) {
      throw NondifferentiablePath("gradient undefined at " + std::to_string(flagged) + " of " +
                                      std::to_string(evaluations) + " quadrature nodes along the path",
                                  fraction);
    }
  };

  QuadratureResult r;
  std::size_t evaluations = 0;
  try {
    r = integrate(segments, n,
                  [&](double t, Vec& out) {
                    ++evaluations;
                    integrand(t, out);
                  },
                  q);
  } catch (const QuadratureDiverged&) {
    check_flagged(evaluations);
    throw;
  }
  check_flagged(r.evaluations);

  Attribution a;
  a.values = std::move(r.value);
  a.method = path_tag(p);
  a.quad_error = r.error_estimate;
  a.residual = sum_of(a.values) - (f.value_at(x_bar) - f.value_at(x_prime));
  return a;
}

Attribution ig(const Model& f, VecView x_bar, VecView x_prime, const QuadratureConfig& q) {
  Attribution a = path_attribution(f, PathSpec::straight(), x_bar, x_prime, q);
  a.method = "ig";
  return a;
}

Attribution ig_monomial_closed_form(const MultiIndex& m, VecView x_bar, VecView x_prime) {
  if (x_bar.size() != m.dim() || x_prime.size() != m.dim()) {
    throw DimensionMismatch("exponents and endpoints differ in length");
  }
  Attribution a;
  a.method = "monomial-closed-form";
  a.values.assign(m.dim(), 0.0);
  const unsigned norm = m.one_norm();
  if (norm == 0) return a;
  double prod = 1.0;
  for (std::size_t i = 0; i < m.dim(); ++i) prod *= std::pow(x_bar[i] - x_prime[i], static_cast<int>(m[i]));
  for (std::size_t i = 0; i < m.dim(); ++i) a.values[i] = static_cast<double>(m[i]) * prod / norm;
  a.residual = sum_of(a.values) - prod;
  return a;
}

Attribution shapley(const Model& f, VecView x_bar, VecView x_prime) {
  const std::size_t n = f.dim();
  if (n > kShapleyMaxInputs) {
    throw TooManyInputs("exact Shapley values enumerate n! orderings; n = " + std::to_string(n) + " exceeds " +
                        std::to_string(kShapleyMaxInputs));
  }
  f.check_input(x_bar);
  f.check_input(x_prime);
  const std::size_t vertices = std::size_t{1} << n;
  Vec value(vertices);
  Vec x(n);
  for (std::size_t s = 0; s < vertices; ++s) {
    for (std::size_t i = 0; i < n; ++i) x[i] = (s >> i) & 1U ? x_bar[i] : x_prime[i];
    value[s] = f.value_at(x);
  }

  // How often input i joins coalition S, over all orderings.
  std::vector<std::uint64_t> joins(n * vertices, 0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t orderings = 0;
  do {
    std::size_t s = 0;
    for (std::size_t i : order) {
      ++joins[i * vertices + s];
      s |= std::size_t{1} << i;
    }
    ++orderings;
  } while (std::next_permutation(order.begin(), order.end()));

  Attribution a;
  a.method = "shapley";
  a.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum acc;
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t s = 0; s < vertices; ++s) {
      const std::uint64_t c = joins[i * vertices + s];
      if (c == 0) continue;
      acc.add(static_cast<double>(c) * (value[s | bit] - value[s]));
    }
    a.values[i] = acc.value() / static_cast<double>(orderings);
  }
  a.residual = sum_of(a.values) - (value[vertices - 1] - value[0]);
  return a;
}

Attribution ensemble_attribution(const Model& f, const PathSpec& ensemble, VecView x_bar, VecView x_prime,
                                 const QuadratureConfig& q) {
  if (ensemble.kind() != PathKind::kEnsemble) throw InvalidPath("ensemble attribution needs an ensemble path");
  Attribution a;
  a.method = "ensemble";
  a.values.assign(f.dim(), 0.0);
  for (const auto& [w, member] : ensemble.members()) {
    const Attribution m = path_attribution(f, member, x_bar, x_prime, q);
    for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += w * m.values[i];
    a.quad_error += w * m.quad_error;
  }
  a.residual = sum_of(a.values) - (f.value_at(x_bar) - f.value_at(x_prime));
  return a;
}

}  // namespace axiograd
