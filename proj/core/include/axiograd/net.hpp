#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "axiograd/errors.hpp"
#include "axiograd/expr.hpp"
#include "axiograd/types.hpp"

namespace axiograd {

enum class ActKind { kIdentity, kRelu, kSoftplus, kSigmoid, kTanh };

struct Activation {
  ActKind kind = ActKind::kIdentity;
  double alpha = 1.0;  // softplus only

  static Activation identity() { return {ActKind::kIdentity, 1.0}; }
  static Activation relu() { return {ActKind::kRelu, 1.0}; }
  static Activation softplus(double alpha) { return {ActKind::kSoftplus, alpha}; }
  static Activation sigmoid() { return {ActKind::kSigmoid, 1.0}; }
  static Activation tanh() { return {ActKind::kTanh, 1.0}; }

  double apply(double z) const noexcept;
  double derivative(double z) const noexcept;

  friend bool operator==(const Activation&, const Activation&) = default;
};

std::string to_string(const Activation& a);

struct AffineLayer {
  Matrix weight;  // out x in
  Vec bias;
};

struct ElementwiseLayer {
  std::vector<Activation> acts;
};

using Layer = std::variant<AffineLayer, ElementwiseLayer>;

/// Feed-forward network of affine and element-wise layers with one output.
///
/// Construction validates the dimension chain and rejects non-finite weights.
class LayeredNet {
 public:
  LayeredNet(std::size_t input_dim, std::vector<Layer> layers);

  std::size_t input_dim() const noexcept { return input_dim_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::size_t relu_count() const noexcept;
  /// True when no element-wise layer uses relu.
  bool analytic() const noexcept { return relu_count() == 0; }

  double eval(VecView x) const;

  struct Gradient {
    Vec gradient;
    std::vector<KinkUnit> kinks;
  };
  /// Reverse accumulation through the layers. ReLU units whose
  /// pre-activation is within kKinkEpsilon of zero are reported as kinks and
  /// differentiated with slope 0.
  Gradient gradient(VecView x) const;

  /// Sign pattern of every relu and softplus pre-activation, in layer order.
  /// Relu entries are 0 or 1, softplus entries 2 or 3.
  void append_signature(VecView x, std::vector<unsigned char>& out) const;
  bool has_switching_units() const noexcept;

 private:
  std::size_t input_dim_;
  std::vector<Layer> layers_;
};

/// Replaces every relu tag by softplus(alpha); other tags are kept.
LayeredNet softplus_smooth(const LayeredNet& net, double alpha);

/// Expression computing the same mapping as a relu-free network.
AnalyticExpr to_expression(const LayeredNet& net);

}  // namespace axiograd
