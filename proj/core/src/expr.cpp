#include "axiograd/expr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "axiograd/activations.hpp"
#include "axiograd/errors.hpp"

namespace axiograd {
namespace {

/// Value plus one tangent component.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator*(double c, Dual a) { return {c * a.v, c * a.d}; }

double value_of(double x) { return x; }
double value_of(Dual x) { return x.v; }

double fn_exp(double x) { return std::exp(x); }
Dual fn_exp(Dual x) {
  const double e = std::exp(x.v);
  return {e, e * x.d};
}
double fn_log(double x) { return std::log(x); }
Dual fn_log(Dual x) { return {std::log(x.v), x.d / x.v}; }
double fn_sin(double x) { return std::sin(x); }
Dual fn_sin(Dual x) { return {std::sin(x.v), std::cos(x.v) * x.d}; }
double fn_cos(double x) { return std::cos(x); }
Dual fn_cos(Dual x) { return {std::cos(x.v), -std::sin(x.v) * x.d}; }
double fn_sigmoid(double x) { return sigmoid(x); }
Dual fn_sigmoid(Dual x) {
  const double s = sigmoid(x.v);
  return {s, s * (1.0 - s) * x.d};
}
double fn_tanh(double x) { return std::tanh(x); }
Dual fn_tanh(Dual x) {
  const double t = std::tanh(x.v);
  return {t, (1.0 - t * t) * x.d};
}
double fn_softplus(double x, double a) { return softplus(x, a); }
Dual fn_softplus(Dual x, double a) { return {softplus(x.v, a), softplus_derivative(x.v, a) * x.d}; }
double fn_pow(double x, int k) { return std::pow(x, k); }
Dual fn_pow(Dual x, int k) {
  if (k == 0) return {1.0, 0.0};
  return {std::pow(x.v, k), k * std::pow(x.v, k - 1) * x.d};
}

template <class T>
T evaluate(const AnalyticExpr::Node& n, std::span<const T> x) {
  switch (n.op) {
    case ExprOp::kConstant:
      return T{n.scalar};
    case ExprOp::kVariable:
      return x[n.index];
    case ExprOp::kSum: {
      T acc{0.0};
      for (const auto& a : n.args) acc = acc + evaluate<T>(a.node(), x);
      return acc;
    }
    case ExprOp::kProduct: {
      T acc{1.0};
      for (const auto& a : n.args) acc = acc * evaluate<T>(a.node(), x);
      return acc;
    }
    case ExprOp::kScale:
      return n.scalar * evaluate<T>(n.args[0].node(), x);
    case ExprOp::kPower: {
      const T b = evaluate<T>(n.args[0].node(), x);
      if (n.exponent < 0 && value_of(b) == 0.0) throw OutOfDomain("negative power of zero");
      return fn_pow(b, n.exponent);
    }
    case ExprOp::kExp:
      return fn_exp(evaluate<T>(n.args[0].node(), x));
    case ExprOp::kLog: {
      const T a = evaluate<T>(n.args[0].node(), x);
      if (!(value_of(a) > 0.0)) throw OutOfDomain("logarithm of a non-positive value");
      return fn_log(a);
    }
    case ExprOp::kSin:
      return fn_sin(evaluate<T>(n.args[0].node(), x));
    case ExprOp::kCos:
      return fn_cos(evaluate<T>(n.args[0].node(), x));
    case ExprOp::kSigmoid:
      return fn_sigmoid(evaluate<T>(n.args[0].node(), x));
    case ExprOp::kTanh:
      return fn_tanh(evaluate<T>(n.args[0].node(), x));
    case ExprOp::kSoftplus:
      return fn_softplus(evaluate<T>(n.args[0].node(), x), n.scalar);
  }
  return T{0.0};
}

AnalyticExpr::Node make_node(ExprOp op, std::vector<AnalyticExpr> args) {
  AnalyticExpr::Node n;
  n.op = op;
  n.args = std::move(args);
  for (const auto& a : n.args) n.min_dim = std::max(n.min_dim, a.min_dim());
  return n;
}

void check_finite(double c, const char* what) {
  if (!std::isfinite(c)) throw InvalidModel(std::string(what) + " must be finite");
}

std::size_t count_nodes(const AnalyticExpr& e) {
  std::size_t c = 1;
  for (const auto& a : e.args()) c += count_nodes(a);
  return c;
}

}  // namespace

std::string_view to_string(ExprOp op) noexcept {
  switch (op) {
    case ExprOp::kConstant: return "const";
    case ExprOp::kVariable: return "var";
    case ExprOp::kSum: return "add";
    case ExprOp::kProduct: return "mul";
    case ExprOp::kScale: return "scale";
    case ExprOp::kPower: return "pow";
    case ExprOp::kExp: return "exp";
    case ExprOp::kLog: return "log";
    case ExprOp::kSin: return "sin";
    case ExprOp::kCos: return "cos";
    case ExprOp::kSigmoid: return "sigmoid";
    case ExprOp::kTanh: return "tanh";
    case ExprOp::kSoftplus: return "softplus";
  }
  return "?";
}

AnalyticExpr::AnalyticExpr() : AnalyticExpr(constant(0.0)) {}

AnalyticExpr AnalyticExpr::constant(double c) {
  check_finite(c, "constant");
  auto n = make_node(ExprOp::kConstant, {});
  n.scalar = c;
  return AnalyticExpr(std::make_shared<const Node>(std::move(n)));
}

AnalyticExpr AnalyticExpr::variable(std::size_t index) {
  auto n = make_node(ExprOp::kVariable, {});
  n.index = index;
  n.min_dim = index + 1;
  return AnalyticExpr(std::make_shared<const Node>(std::move(n)));
}

AnalyticExpr AnalyticExpr::sum(std::vector<AnalyticExpr> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms.front();
  return AnalyticExpr(std::make_shared<const Node>(make_node(ExprOp::kSum, std::move(terms))));
}

AnalyticExpr AnalyticExpr::product(std::vector<AnalyticExpr> factors) {
  if (factors.empty()) return constant(1.0);
  if (factors.size() == 1) return factors.front();
  return AnalyticExpr(std::make_shared<const Node>(make_node(ExprOp::kProduct, std::move(factors))));
}

AnalyticExpr AnalyticExpr::scale(double factor, AnalyticExpr arg) {
  check_finite(factor, "scale factor");
  auto n = make_node(ExprOp::kScale, {std::move(arg)});
  n.scalar = factor;
  return AnalyticExpr(std::make_shared<const Node>(std::move(n)));
}

AnalyticExpr AnalyticExpr::power(AnalyticExpr base, int exponent) {
  auto n = make_node(ExprOp::kPower, {std::move(base)});
  n.exponent = exponent;
  return AnalyticExpr(std::make_shared<const Node>(std::move(n)));
}

#define AXIOGRAD_UNARY(name, op)                                                          \
  AnalyticExpr AnalyticExpr::name(AnalyticExpr arg) {                                     \
    return AnalyticExpr(std::make_shared<const Node>(make_node(op, {std::move(arg)}))); \
  }
AXIOGRAD_UNARY(exp, ExprOp::kExp)
AXIOGRAD_UNARY(log, ExprOp::kLog)
AXIOGRAD_UNARY(sin, ExprOp::kSin)
AXIOGRAD_UNARY(cos, ExprOp::kCos)
AXIOGRAD_UNARY(sigmoid, ExprOp::kSigmoid)
AXIOGRAD_UNARY(tanh, ExprOp::kTanh)
#undef AXIOGRAD_UNARY

AnalyticExpr AnalyticExpr::softplus(AnalyticExpr arg, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidAlpha("softplus alpha must be positive and finite");
  auto n = make_node(ExprOp::kSoftplus, {std::move(arg)});
  n.scalar = alpha;
  return AnalyticExpr(std::make_shared<const Node>(std::move(n)));
}

ExprOp AnalyticExpr::op() const noexcept { return node_->op; }
double AnalyticExpr::scalar() const noexcept { return node_->scalar; }
std::size_t AnalyticExpr::index() const noexcept { return node_->index; }
int AnalyticExpr::exponent() const noexcept { return node_->exponent; }
const std::vector<AnalyticExpr>& AnalyticExpr::args() const noexcept { return node_->args; }
std::size_t AnalyticExpr::min_dim() const noexcept { return node_->min_dim; }
std::size_t AnalyticExpr::node_count() const { return count_nodes(*this); }

double AnalyticExpr::eval(VecView x) const {
  if (x.size() < min_dim()) throw DimensionMismatch("input shorter than expression arity");
  return evaluate<double>(*node_, x);
}

double AnalyticExpr::partial(VecView x, std::size_t i) const {
  if (x.size() < min_dim()) throw DimensionMismatch("input shorter than expression arity");
  if (i >= x.size()) throw DimensionMismatch("partial index out of range");
  std::vector<Dual> xd(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) xd[k] = {x[k], k == i ? 1.0 : 0.0};
  return evaluate<Dual>(*node_, std::span<const Dual>(xd)).d;
}

Vec AnalyticExpr::gradient(VecView x) const {
  if (x.size() < min_dim()) throw DimensionMismatch("input shorter than expression arity");
  Vec g(x.size(), 0.0);
  std::vector<Dual> xd(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) xd[k] = {x[k], 0.0};
  // Inputs beyond min_dim() cannot appear in the tree; their partial is 0.
  for (std::size_t i = 0; i < min_dim(); ++i) {
    xd[i].d = 1.0;
    g[i] = evaluate<Dual>(*node_, std::span<const Dual>(xd)).d;
    xd[i].d = 0.0;
  }
  return g;
}

AnalyticExpr operator+(const AnalyticExpr& a, const AnalyticExpr& b) { return AnalyticExpr::sum({a, b}); }
AnalyticExpr operator-(const AnalyticExpr& a, const AnalyticExpr& b) {
  return AnalyticExpr::sum({a, AnalyticExpr::scale(-1.0, b)});
}
AnalyticExpr operator*(const AnalyticExpr& a, const AnalyticExpr& b) { return AnalyticExpr::product({a, b}); }
AnalyticExpr operator*(double c, const AnalyticExpr& a) { return AnalyticExpr::scale(c, a); }

AnalyticExpr monomial(const MultiIndex& m, VecView center) {
  if (center.size() != m.dim()) throw DimensionMismatch("monomial center and exponents differ in length");
  std::vector<AnalyticExpr> factors;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    if (m[i] == 0) continue;
    AnalyticExpr base = AnalyticExpr::variable(i);
    if (center[i] != 0.0) base = AnalyticExpr::sum({base, AnalyticExpr::constant(-center[i])});
    factors.push_back(m[i] == 1 ? base : AnalyticExpr::power(base, static_cast<int>(m[i])));
  }
  return AnalyticExpr::product(std::move(factors));
}

}  // namespace axiograd
