#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "axiograd/types.hpp"

namespace axiograd {

enum class QuadratureRule { kGaussLegendre, kMidpoint };

struct QuadratureConfig {
  QuadratureRule rule = QuadratureRule::kGaussLegendre;
  unsigned order = 16;           // nodes per panel
  std::size_t panels = 8;        // initial panels per segment
  std::size_t max_panels = 1024; // refinement stops past this many per segment
  double tolerance = 1e-10;      // absolute, infinity norm

  static QuadratureConfig gauss_legendre(unsigned order = 16);
  static QuadratureConfig midpoint(unsigned points);

  /// Raises InvalidConfig.
  void validate() const;
};

std::string to_string(QuadratureRule rule);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  Vec nodes;
  Vec weights;
};
const GaussRule& gauss_legendre_rule(unsigned n);

/// A sub-interval of the integration range. Graded ends get geometrically
/// shrinking panels, for integrands that are singular or steep there.
struct Segment {
  double a = 0.0;
  double b = 1.0;
  bool grade_left = false;
  bool grade_right = false;
};

struct QuadratureResult {
  Vec value;
  double error_estimate = 0.0;
  std::size_t levels = 0;
  std::size_t evaluations = 0;
};

/// f(t, out) writes the integrand at t into out (already sized).
using VectorIntegrand = std::function<void(double, Vec&)>;

/// Composite rule over the segments, doubling panels until two successive
/// estimates agree to tolerance. Raises QuadratureDiverged at the panel limit.
QuadratureResult integrate(const std::vector<Segment>& segments, std::size_t width, const VectorIntegrand& f,
                           const QuadratureConfig& config);

}  // namespace axiograd
