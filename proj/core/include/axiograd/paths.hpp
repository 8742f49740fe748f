#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "axiograd/errors.hpp"
#include "axiograd/types.hpp"

namespace axiograd {

enum class PathKind { kStraight, kPower, kPiecewiseLinear, kLShape, kEnsemble };
enum class LVariant { kXY, kYX };

/// A curve gamma(t) from x' (t = 0) to x_bar (t = 1), or a finite weighted
/// mixture of such curves.
///
/// Specs are values: binding endpoints or adding a time warp returns a new
/// spec. A piecewise-linear spec is bound to its first and last waypoint on
/// construction; rebinding checks that they agree.
class PathSpec {
 public:
  static PathSpec straight();
  /// gamma_i = x'_i + d_i t^(d_i^2), d = x_bar - x'
  static PathSpec power();
  static PathSpec piecewise_linear(std::vector<Vec> waypoints);
  /// Two axis-parallel legs through (x_bar_1, x'_2) for xy or (x'_1, x_bar_2)
  /// for yx. Two inputs only.
  static PathSpec lshape(LVariant variant);
  /// Weights must be non-negative and sum to 1 within 1e-12.
  static PathSpec ensemble(std::vector<std::pair<double, PathSpec>> members);

  PathSpec bound(Vec x_bar, Vec x_prime) const;
  /// Reparametrized curve t -> gamma(t^p), p > 0.
  PathSpec warped(double p) const;

  PathKind kind() const noexcept { return kind_; }
  bool is_bound() const noexcept { return bound_; }
  const Vec& x_bar() const;
  const Vec& x_prime() const;
  double warp() const noexcept { return warp_; }
  LVariant variant() const noexcept { return variant_; }
  /// Corner points including both ends; empty unless piecewise and bound.
  const std::vector<Vec>& waypoints() const noexcept { return waypoints_; }
  const std::vector<std::pair<double, PathSpec>>& members() const noexcept { return members_; }
  std::size_t dim() const;

  /// Interior parameters where the derivative jumps, ascending.
  std::vector<double> breakpoints() const;

 private:
  PathKind kind_ = PathKind::kStraight;
  LVariant variant_ = LVariant::kXY;
  bool bound_ = false;
  Vec x_bar_;
  Vec x_prime_;
  double warp_ = 1.0;
  std::vector<Vec> waypoints_;
  std::vector<std::pair<double, PathSpec>> members_;
};

/// gamma(t). Endpoints are returned bit-exactly.
Vec path_eval(const PathSpec& p, double t);
/// d gamma / dt. Raises AtBreakpoint at an interior corner.
Vec path_deriv(const PathSpec& p, double t);

PathSpec lshape_paths(LVariant variant);

/// Sampled check that every coordinate is monotone in t; ensembles need every
/// member to be monotone.
bool is_monotone(const PathSpec& p, std::size_t samples = 10000);

}  // namespace axiograd
