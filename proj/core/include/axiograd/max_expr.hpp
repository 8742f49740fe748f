#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "axiograd/errors.hpp"
#include "axiograd/net.hpp"
#include "axiograd/types.hpp"

namespace axiograd {

enum class MaxOp { kInput, kConstant, kAffine, kMax, kUnsupported };

/// Piecewise-affine expression built from inputs, affine combinations and
/// two-input maxima. Evaluates maxima directly, without the ReLU rewrite.
class MaxExpr {
 public:
  struct Node;

  static MaxExpr input(std::size_t index);
  static MaxExpr constant(double c);
  /// sum_k weights[k] * args[k] + bias
  static MaxExpr affine(std::vector<double> weights, std::vector<MaxExpr> args, double bias);
  /// Multi-input max, nested left to right into two-input maxima.
  static MaxExpr max(std::vector<MaxExpr> args);
  /// Placeholder for an operator outside {max, affine}; kept so that parsed
  /// trees can be reported by rewrite_max_to_relu.
  static MaxExpr unsupported(std::string op, std::vector<MaxExpr> args);

  MaxOp op() const noexcept;
  std::size_t index() const noexcept;
  double constant_value() const noexcept;
  double bias() const noexcept;
  const std::vector<double>& weights() const noexcept;
  const std::vector<MaxExpr>& args() const noexcept;
  const std::string& op_name() const noexcept;
  std::size_t min_dim() const noexcept;

  double eval(VecView x) const;

  struct Gradient {
    Vec gradient;
    std::vector<KinkUnit> kinks;  // {max node ordinal, 0}
  };
  /// Ties pick the second argument, matching relu'(0) = 0 in the rewrite.
  Gradient gradient(VecView x) const;
  void append_signature(VecView x, std::vector<unsigned char>& out) const;
  std::size_t max_count() const;

  const Node* id() const noexcept { return node_.get(); }

 private:
  explicit MaxExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct MaxExpr::Node {
  MaxOp op = MaxOp::kConstant;
  std::size_t index = 0;
  double value = 0.0;  // constant value or affine bias
  std::vector<double> weights;
  std::vector<MaxExpr> args;
  std::string name;
  std::size_t min_dim = 0;
};

/// Compiles a max/affine tree into a layered ReLU network using
/// max(a, b) = relu(a - b) + b, carrying earlier values through identity units.
LayeredNet rewrite_max_to_relu(const MaxExpr& spec, std::size_t input_dim);

}  // namespace axiograd
