#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "axiograd/attribution.hpp"
#include "axiograd/expr.hpp"
#include "axiograd/io.hpp"
#include "axiograd/model.hpp"
#include "axiograd/net.hpp"
#include "axiograd/paths.hpp"
#include "axiograd/quadrature.hpp"

namespace axiograd {

/// Attributions of a family of approximations F_p over a parameter grid.
///
/// With a reference, delta_k = |A_k - reference|_inf. Without one, deltas
/// are Cauchy differences: delta_k = |A_k - A_(k-1)|_inf for k > 0 and
/// delta_0 = |A_0 - A_1|_inf.
struct ConvergenceSeries {
  std::string kind;  // "softplus" or "taylor"
  Vec grid;
  std::vector<Attribution> attributions;
  Vec deltas;
  std::optional<Vec> reference;
  std::string note;
};

/// Default softplus grid {1, 10, ..., 1e5}.
Vec default_alpha_grid();

/// ig of softplus_smooth(net, alpha) for each alpha; the reference is
/// ig(net) when it is defined. Raises InvalidConfig for a grid that is not
/// strictly increasing.
ConvergenceSeries softplus_convergence_study(const LayeredNet& net, VecView x_bar, VecView x_prime,
                                             const Vec& alphas, const QuadratureConfig& q = {});

/// sup over seeded samples in `box` (plus its center) of
/// |F_alpha(x) - F(x)|, one entry per alpha.
Vec uniform_convergence_probe(const LayeredNet& net, const Vec& alphas, std::size_t samples, const Box& box,
                              std::uint64_t seed = 42);

/// ig of the order-l Taylor polynomial at x' for each l, against ig(expr).
ConvergenceSeries taylor_convergence_study(const AnalyticExpr& expr, VecView x_bar, VecView x_prime,
                                           const std::vector<unsigned>& orders, const QuadratureConfig& q = {});

/// Fraction of t = (k + 0.5) / samples at which the gradient along the bound
/// path has no kink.
double path_differentiability_probe(const Model& model, const PathSpec& path, std::size_t samples = 1000);

Json series_to_json(const ConvergenceSeries& s);
ConvergenceSeries series_from_json(const Json& j);
/// param,A1..An,delta,residual
std::string series_csv(const ConvergenceSeries& s);

}  // namespace axiograd
