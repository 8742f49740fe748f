#pragma once

#include <cmath>

namespace axiograd {

inline double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Parameterized softplus s_a(z) = ln(1 + exp(a z)) / a, in the overflow-free
/// form max(z, 0) + log1p(exp(-a |z|)) / a.
inline double softplus(double z, double alpha) noexcept {
  return std::fmax(z, 0.0) + std::log1p(std::exp(-alpha * std::abs(z))) / alpha;
}

/// d/dz s_a(z) = sigmoid(a z).
inline double softplus_derivative(double z, double alpha) noexcept { return sigmoid(alpha * z); }

inline double relu(double z) noexcept { return z > 0.0 ? z : 0.0; }

}  // namespace axiograd
