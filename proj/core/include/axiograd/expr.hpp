#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include "axiograd/types.hpp"

namespace axiograd {

enum class ExprOp {
  kConstant,
  kVariable,
  kSum,
  kProduct,
  kScale,
  kPower,
  kExp,
  kLog,
  kSin,
  kCos,
  kSigmoid,
  kTanh,
  kSoftplus,
};

std::string_view to_string(ExprOp op) noexcept;

/// Immutable expression tree over a closed set of real-analytic nodes.
///
/// Nodes are shared, so copying an expression is cheap and sub-expressions
/// may be reused. Every node has an exact derivative, which keeps forward-mode
/// differentiation and Taylor expansion total over the node set. Logarithms
/// and negative integer powers are only analytic where their argument stays
/// away from zero; evaluating outside that region raises OutOfDomain.
class AnalyticExpr {
 public:
  struct Node;

  /// The constant 0.
  AnalyticExpr();

  static AnalyticExpr constant(double c);
  static AnalyticExpr variable(std::size_t index);
  static AnalyticExpr sum(std::vector<AnalyticExpr> terms);
  static AnalyticExpr product(std::vector<AnalyticExpr> factors);
  static AnalyticExpr scale(double factor, AnalyticExpr arg);
  static AnalyticExpr power(AnalyticExpr base, int exponent);
  static AnalyticExpr exp(AnalyticExpr arg);
  static AnalyticExpr log(AnalyticExpr arg);
  static AnalyticExpr sin(AnalyticExpr arg);
  static AnalyticExpr cos(AnalyticExpr arg);
  static AnalyticExpr sigmoid(AnalyticExpr arg);
  static AnalyticExpr tanh(AnalyticExpr arg);
  static AnalyticExpr softplus(AnalyticExpr arg, double alpha);

  ExprOp op() const noexcept;
  /// Constant value, scale factor or softplus alpha, depending on op().
  double scalar() const noexcept;
  std::size_t index() const noexcept;
  int exponent() const noexcept;
  const std::vector<AnalyticExpr>& args() const noexcept;

  /// Smallest input dimension the expression can be evaluated on.
  std::size_t min_dim() const noexcept;
  std::size_t node_count() const;

  double eval(VecView x) const;
  double partial(VecView x, std::size_t i) const;
  /// Forward mode, one tangent pass per input.
  Vec gradient(VecView x) const;

  const Node& node() const noexcept { return *node_; }

 private:
  explicit AnalyticExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct AnalyticExpr::Node {
  ExprOp op = ExprOp::kConstant;
  double scalar = 0.0;
  std::size_t index = 0;
  int exponent = 0;
  std::vector<AnalyticExpr> args;
  std::size_t min_dim = 0;
};

AnalyticExpr operator+(const AnalyticExpr& a, const AnalyticExpr& b);
AnalyticExpr operator-(const AnalyticExpr& a, const AnalyticExpr& b);
AnalyticExpr operator*(const AnalyticExpr& a, const AnalyticExpr& b);
AnalyticExpr operator*(double c, const AnalyticExpr& a);

/// [x - x']^m as a product of integer powers; the empty product is 1.
AnalyticExpr monomial(const MultiIndex& m, VecView center);

}  // namespace axiograd
