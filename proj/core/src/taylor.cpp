#include "axiograd/taylor.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "axiograd/activations.hpp"
#include "axiograd/errors.hpp"

namespace axiograd {
namespace {

using Index = std::vector<unsigned>;

/// Every multi-index of total degree <= order, sorted by degree, with an
/// addition table restricted to sums that stay within the order.
class IndexSet {
 public:
  IndexSet(std::size_t n, unsigned order) : n_(n), order_(order) {
    Index m(n, 0);
    for (unsigned d = 0; d <= order; ++d) {
      degree_start_.push_back(indices_.size());
      enumerate(m, 0, d);
    }
    degree_start_.push_back(indices_.size());
    for (std::size_t k = 0; k < indices_.size(); ++k) lookup_.emplace(indices_[k], k);
  }

  std::size_t size() const { return indices_.size(); }
  unsigned order() const { return order_; }
  std::size_t dim() const { return n_; }
  const Index& at(std::size_t k) const { return indices_[k]; }
  unsigned degree(std::size_t k) const { return degrees_[k]; }
  /// Positions [begin, end) of indices with degree <= d.
  std::size_t end_of_degree(unsigned d) const { return degree_start_[d + 1]; }
  std::size_t unit(std::size_t i) const {
    Index e(n_, 0);
    e[i] = 1;
    return lookup_.at(e);
  }

  /// Pairs (a, b, a+b) for all products that stay within the order.
  const std::vector<std::array<std::size_t, 3>>& products() {
    if (products_.empty()) {
      Index s(n_);
      for (std::size_t a = 0; a < size(); ++a) {
        const std::size_t b_end = end_of_degree(order_ - degrees_[a]);
        for (std::size_t b = 0; b < b_end; ++b) {
          for (std::size_t i = 0; i < n_; ++i) s[i] = indices_[a][i] + indices_[b][i];
          products_.push_back({a, b, lookup_.at(s)});
        }
      }
    }
    return products_;
  }

 private:
  void enumerate(Index& m, std::size_t pos, unsigned remaining) {
    if (pos + 1 == n_) {
      m[pos] = remaining;
      indices_.push_back(m);
      degrees_.push_back(degree_of(m));
      return;
    }
    for (unsigned v = remaining + 1; v-- > 0;) {
      m[pos] = v;
      enumerate(m, pos + 1, remaining - v);
    }
    m[pos] = 0;
  }

  static unsigned degree_of(const Index& m) {
    unsigned d = 0;
    for (unsigned v : m) d += v;
    return d;
  }

  std::size_t n_;
  unsigned order_;
  std::vector<Index> indices_;
  std::vector<unsigned> degrees_;
  std::vector<std::size_t> degree_start_;
  std::map<Index, std::size_t> lookup_;
  std::vector<std::array<std::size_t, 3>> products_;
};

/// Truncated power series in (x - x').
struct Jet {
  Vec c;
};

class JetEngine {
 public:
  JetEngine(std::size_t n, unsigned order, VecView center) : set_(n, order), center_(center) {}

  IndexSet& set() { return set_; }

  Jet run(const AnalyticExpr& e) {
    if (auto it = memo_.find(&e.node()); it != memo_.end()) return it->second;
    Jet r = compute(e);
    memo_.emplace(&e.node(), r);
    return r;
  }

 private:
  Jet zero() { return {Vec(set_.size(), 0.0)}; }

  Jet constant(double v) {
    Jet j = zero();
    j.c[0] = v;
    return j;
  }

  Jet mul(const Jet& a, const Jet& b) {
    Jet r = zero();
    for (const auto& [i, k, s] : set_.products()) r.c[s] += a.c[i] * b.c[k];
    return r;
  }

  /// f(u) for f given by its Taylor coefficients about u0 = u.c[0].
  Jet compose(const Jet& u, const Vec& coef) {
    Jet h = u;
    h.c[0] = 0.0;
    Jet r = constant(coef.back());
    for (std::size_t k = coef.size() - 1; k-- > 0;) {
      r = mul(r, h);
      r.c[0] += coef[k];
    }
    return r;
  }

  // Coefficients s_k of sigmoid(z0 + w) in powers of w, from s' = s (1 - s).
  Vec sigmoid_series(double z0, std::size_t len) {
    Vec s(len, 0.0);
    s[0] = sigmoid(z0);
    for (std::size_t k = 0; k + 1 < len; ++k) {
      double conv = 0.0;
      for (std::size_t j = 0; j <= k; ++j) conv += s[j] * s[k - j];
      s[k + 1] = (s[k] - conv) / static_cast<double>(k + 1);
    }
    return s;
  }

  Jet compute(const AnalyticExpr& e) {
    const std::size_t len = set_.order() + 1;
    switch (e.op()) {
      case ExprOp::kConstant:
        return constant(e.scalar());
      case ExprOp::kVariable: {
        Jet j = constant(center_[e.index()]);
        if (set_.order() > 0) j.c[set_.unit(e.index())] = 1.0;
        return j;
      }
      case ExprOp::kSum: {
        Jet r = zero();
        for (const auto& a : e.args()) {
          const Jet t = run(a);
          for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] += t.c[k];
        }
        return r;
      }
      case ExprOp::kProduct: {
        Jet r = run(e.args().front());
        for (std::size_t a = 1; a < e.args().size(); ++a) r = mul(r, run(e.args()[a]));
        return r;
      }
      case ExprOp::kScale: {
        Jet r = run(e.args().front());
        for (double& v : r.c) v *= e.scalar();
        return r;
      }
      case ExprOp::kPower: {
        const Jet u = run(e.args().front());
        const int p = e.exponent();
        const double u0 = u.c[0];
        if (p >= 0) {
          Jet r = constant(1.0);
          for (int k = 0; k < p; ++k) r = mul(r, u);
          return r;
        }
        if (u0 == 0.0) throw OutOfDomain("negative power of zero");
        Vec coef(len);
        double binom = 1.0;  // p (p-1) ... (p-k+1) / k!
        for (std::size_t k = 0; k < len; ++k) {
          coef[k] = binom * std::pow(u0, p - static_cast<int>(k));
          binom *= (p - static_cast<double>(k)) / static_cast<double>(k + 1);
        }
        return compose(u, coef);
      }
      case ExprOp::kExp: {
        const Jet u = run(e.args().front());
        Vec coef(len);
        double f = std::exp(u.c[0]);
        for (std::size_t k = 0; k < len; ++k) {
          coef[k] = f;
          f /= static_cast<double>(k + 1);
        }
        return compose(u, coef);
      }
      case ExprOp::kLog: {
        const Jet u = run(e.args().front());
        const double u0 = u.c[0];
        if (!(u0 > 0.0)) throw OutOfDomain("logarithm of a non-positive value");
        Vec coef(len);
        coef[0] = std::log(u0);
        for (std::size_t k = 1; k < len; ++k) {
          const double sign = (k % 2 == 1) ? 1.0 : -1.0;
          coef[k] = sign / (static_cast<double>(k) * std::pow(u0, static_cast<double>(k)));
        }
        return compose(u, coef);
      }
      case ExprOp::kSin:
      case ExprOp::kCos: {
        const Jet u = run(e.args().front());
        const double s = std::sin(u.c[0]);
        const double c = std::cos(u.c[0]);
        // k-th derivatives cycle through these four values.
        const double cycle_sin[4] = {s, c, -s, -c};
        const double cycle_cos[4] = {c, -s, -c, s};
        const double* cycle = e.op() == ExprOp::kSin ? cycle_sin : cycle_cos;
        Vec coef(len);
        double fact = 1.0;
        for (std::size_t k = 0; k < len; ++k) {
          if (k > 0) fact *= static_cast<double>(k);
          coef[k] = cycle[k % 4] / fact;
        }
        return compose(u, coef);
      }
      case ExprOp::kSigmoid: {
        const Jet u = run(e.args().front());
        return compose(u, sigmoid_series(u.c[0], len));
      }
      case ExprOp::kTanh: {
        // tanh(u) = 2 sigmoid(2u) - 1
        const Jet u = run(e.args().front());
        Vec coef = sigmoid_series(2.0 * u.c[0], len);
        double scale = 2.0;
        for (std::size_t k = 0; k < len; ++k) {
          coef[k] *= scale;
          scale *= 2.0;
        }
        coef[0] -= 1.0;
        return compose(u, coef);
      }
      case ExprOp::kSoftplus: {
        // s_a'(u) = sigmoid(a u); integrate the series term by term.
        const Jet u = run(e.args().front());
        const double a = e.scalar();
        const Vec sig = sigmoid_series(a * u.c[0], len);
        Vec coef(len);
        coef[0] = softplus(u.c[0], a);
        double scale = 1.0;
        for (std::size_t k = 0; k + 1 < len; ++k) {
          coef[k + 1] = sig[k] * scale / static_cast<double>(k + 1);
          scale *= a;
        }
        return compose(u, coef);
      }
    }
    return zero();
  }

  IndexSet set_;
  VecView center_;
  std::map<const AnalyticExpr::Node*, Jet> memo_;
};

}  // namespace

std::size_t taylor_term_count(std::size_t n, unsigned order) noexcept {
  // C(n + order, order), built up as a running product of exact binomials.
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t c = 1;
  for (unsigned k = 1; k <= order; ++k) {
    const std::size_t num = n + k;
    if (c > kMax / num) return kMax;
    c = c * num / k;
  }
  return c;
}

AnalyticExpr taylor(const AnalyticExpr& expr, VecView x_prime, unsigned order, std::size_t max_terms) {
  if (x_prime.size() < expr.min_dim()) throw DimensionMismatch("expansion point shorter than expression arity");
  const std::size_t n = expr.min_dim();
  if (n == 0) return AnalyticExpr::constant(expr.eval(x_prime));
  const std::size_t count = taylor_term_count(n, order);
  if (count > max_terms) {
    throw OrderTooLarge("order " + std::to_string(order) + " in " + std::to_string(n) + " variables needs " +
                        std::to_string(count) + " terms, cap is " + std::to_string(max_terms));
  }
  const Vec center(x_prime.begin(), x_prime.begin() + static_cast<std::ptrdiff_t>(n));
  JetEngine engine(n, order, center);
  const Jet j = engine.run(expr);

  std::vector<AnalyticExpr> terms;
  for (std::size_t k = 0; k < j.c.size(); ++k) {
    if (j.c[k] == 0.0) continue;
    const AnalyticExpr mono = monomial(MultiIndex(engine.set().at(k)), center);
    terms.push_back(k == 0 ? AnalyticExpr::constant(j.c[k]) : (j.c[k] == 1.0 ? mono : AnalyticExpr::scale(j.c[k], mono)));
  }
  return AnalyticExpr::sum(std::move(terms));
}

}  // namespace axiograd
