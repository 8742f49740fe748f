#pragma once

#include <cstddef>
#include <string>

#include "axiograd/errors.hpp"
#include "axiograd/model.hpp"
#include "axiograd/paths.hpp"
#include "axiograd/quadrature.hpp"
#include "axiograd/types.hpp"

namespace axiograd {

inline constexpr double kJitterStep = 1e-9;
inline constexpr double kFlaggedFractionLimit = 1e-3;
inline constexpr std::size_t kShapleyMaxInputs = 10;

struct Attribution {
  Vec values;
  std::string method;
  double quad_error = 0.0;
  /// sum(values) - (F(x_bar) - F(x'))
  double residual = 0.0;
};

/// A_i = int_0^1 dF/dx_i(gamma(t)) dgamma_i/dt dt.
///
/// The range is split at path corners and at parameters where a relu, max or
/// softplus unit switches. Nodes landing on a kink are moved by +/-1e-9; if
/// more than a 1e-3 fraction stay on one, NondifferentiablePath is raised.
Attribution path_attribution(const Model& f, const PathSpec& path, VecView x_bar, VecView x_prime,
                             const QuadratureConfig& q = {});

/// Integrated gradients: the straight-line path method.
Attribution ig(const Model& f, VecView x_bar, VecView x_prime, const QuadratureConfig& q = {});

/// m_i / |m|_1 * [x_bar - x']^m, or zeros when m = 0.
Attribution ig_monomial_closed_form(const MultiIndex& m, VecView x_bar, VecView x_prime);

/// Exact Shapley values of the game S -> F(x' with coordinates in S set to
/// x_bar), averaged over all n! orderings. At most 10 inputs.
Attribution shapley(const Model& f, VecView x_bar, VecView x_prime);

/// Weighted sum of member path attributions.
Attribution ensemble_attribution(const Model& f, const PathSpec& ensemble, VecView x_bar, VecView x_prime,
                                 const QuadratureConfig& q = {});

}  // namespace axiograd
