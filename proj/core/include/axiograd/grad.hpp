#pragma once

#include <cstddef>
#include <vector>

#include "axiograd/errors.hpp"
#include "axiograd/model.hpp"
#include "axiograd/types.hpp"

namespace axiograd {

struct GradResult {
  Vec gradient;
  bool differentiable = true;
  std::vector<KinkUnit> kink_units;
};

/// dF/dx_i at x. Raises NondifferentiableAt when a relu or max unit sits on
/// its kink.
double partial(const Model& model, std::size_t i, VecView x);

/// Full gradient; kinks are reported in the result instead of raised. Units
/// at a kink contribute slope 0.
GradResult grad(const Model& model, VecView x);

/// Largest |central difference - exact partial| / (1 + |exact partial|) over
/// all inputs, with step h. Raises NondifferentiableNearby when x or any
/// probe point touches a kink, or when a relu or max unit switches between x
/// and a probe point.
double fd_check(const Model& model, VecView x, double h);

}  // namespace axiograd
