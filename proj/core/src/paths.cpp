#include "axiograd/paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace axiograd {
namespace {

void require_pointwise(const PathSpec& p) {
  if (p.kind() == PathKind::kEnsemble) throw EnsembleNotPointwise("an ensemble has no single point at t");
  if (!p.is_bound()) throw Unbound("path endpoints are not bound");
}

void check_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidPath("path parameter must lie in [0, 1]");
}

bool points_agree(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max({1.0, std::abs(a[i]), std::abs(b[i])})) return false;
  }
  return true;
}

// Segment index and local parameter for equal t-allocation.
std::pair<std::size_t, double> locate(std::size_t segments, double tau) {
  const double scaled = tau * static_cast<double>(segments);
  const auto k = std::min(static_cast<std::size_t>(scaled), segments - 1);
  return {k, scaled - static_cast<double>(k)};
}

}  // namespace

PathSpec PathSpec::straight() { return PathSpec(); }

PathSpec PathSpec::power() {
  PathSpec p;
  p.kind_ = PathKind::kPower;
  return p;
}

PathSpec PathSpec::piecewise_linear(std::vector<Vec> waypoints) {
  if (waypoints.size() < 2) throw InvalidPath("piecewise-linear path needs at least two waypoints");
  for (const auto& w : waypoints) {
    if (w.size() != waypoints.front().size()) throw InvalidPath("waypoints differ in dimension");
    for (double v : w) {
      if (!std::isfinite(v)) throw InvalidPath("waypoints must be finite");
    }
  }
  PathSpec p;
  p.kind_ = PathKind::kPiecewiseLinear;
  p.x_prime_ = waypoints.front();
  p.x_bar_ = waypoints.back();
  p.waypoints_ = std::move(waypoints);
  p.bound_ = true;
  return p;
}

PathSpec PathSpec::lshape(LVariant variant) {
  PathSpec p;
  p.kind_ = PathKind::kLShape;
  p.variant_ = variant;
  return p;
}

PathSpec PathSpec::ensemble(std::vector<std::pair<double, PathSpec>> members) {
  if (members.empty()) throw InvalidPath("ensemble needs at least one member");
  double total = 0.0;
  for (const auto& [w, m] : members) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidPath("ensemble weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidPath("ensemble weights must sum to 1");
  PathSpec p;
  p.kind_ = PathKind::kEnsemble;
  p.members_ = std::move(members);
  return p;
}

PathSpec PathSpec::bound(Vec x_bar, Vec x_prime) const {
  if (x_bar.size() != x_prime.size()) throw DimensionMismatch("endpoints differ in dimension");
  PathSpec p = *this;
  switch (kind_) {
    case PathKind::kStraight:
    case PathKind::kPower:
      break;
    case PathKind::kPiecewiseLinear:
      if (!points_agree(waypoints_.front(), x_prime) || !points_agree(waypoints_.back(), x_bar)) {
        throw InvalidPath("waypoints must start at the baseline and end at the input");
      }
      break;
    case PathKind::kLShape: {
      if (x_bar.size() != 2) {
        throw WrongDimension("L-shaped paths need exactly two inputs, got " + std::to_string(x_bar.size()));
      }
      const Vec corner = variant_ == LVariant::kXY ? Vec{x_bar[0], x_prime[1]} : Vec{x_prime[0], x_bar[1]};
      p.waypoints_ = {x_prime, corner, x_bar};
      break;
    }
    case PathKind::kEnsemble:
      for (auto& [w, m] : p.members_) m = m.bound(x_bar, x_prime);
      break;
  }
  p.x_bar_ = std::move(x_bar);
  p.x_prime_ = std::move(x_prime);
  p.bound_ = true;
  return p;
}

PathSpec PathSpec::warped(double p) const {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidPath("warp exponent must be positive");
  PathSpec out = *this;
  if (kind_ == PathKind::kEnsemble) {
    for (auto& [w, m] : out.members_) m = m.warped(p);
  }
  out.warp_ *= p;
  return out;
}

const Vec& PathSpec::x_bar() const {
  if (!bound_) throw Unbound("path endpoints are not bound");
  return x_bar_;
}

const Vec& PathSpec::x_prime() const {
  if (!bound_) throw Unbound("path endpoints are not bound");
  return x_prime_;
}

std::size_t PathSpec::dim() const { return x_bar().size(); }

std::vector<double> PathSpec::breakpoints() const {
  std::vector<double> out;
  if (waypoints_.size() > 2 && kind_ != PathKind::kEnsemble) {
    const std::size_t segs = waypoints_.size() - 1;
    for (std::size_t k = 1; k < segs; ++k) {
      out.push_back(std::pow(static_cast<double>(k) / static_cast<double>(segs), 1.0 / warp_));
    }
  }
  return out;
}

Vec path_eval(const PathSpec& p, double t) {
  require_pointwise(p);
  check_t(t);
  if (t == 0.0) return p.x_prime();
  if (t == 1.0) return p.x_bar();
  const double tau = p.warp() == 1.0 ? t : std::pow(t, p.warp());
  const Vec& xb = p.x_bar();
  const Vec& xp = p.x_prime();
  Vec out(xb.size());
  switch (p.kind()) {
    case PathKind::kStraight:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = xp[i] + tau * (xb[i] - xp[i]);
      break;
    case PathKind::kPower:
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = xb[i] - xp[i];
        out[i] = d == 0.0 ? xp[i] : xp[i] + d * std::pow(t, d * d * p.warp());
      }
      break;
    case PathKind::kPiecewiseLinear:
    case PathKind::kLShape: {
      const auto& w = p.waypoints();
      const auto [k, u] = locate(w.size() - 1, tau);
      if (u == 0.0) return w[k];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = w[k][i] + u * (w[k + 1][i] - w[k][i]);
      break;
    }
    case PathKind::kEnsemble:
      break;  // rejected above
  }
  return out;
}

Vec path_deriv(const PathSpec& p, double t) {
  require_pointwise(p);
  check_t(t);
  const double warp = p.warp();
  const double tau = warp == 1.0 ? t : std::pow(t, warp);
  // d tau / dt
  const double dtau = warp == 1.0 ? 1.0 : warp * std::pow(t, warp - 1.0);
  const Vec& xb = p.x_bar();
  const Vec& xp = p.x_prime();
  Vec out(xb.size(), 0.0);
  switch (p.kind()) {
    case PathKind::kStraight:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = (xb[i] - xp[i]) * dtau;
      break;
    case PathKind::kPower:
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = xb[i] - xp[i];
        if (d == 0.0) continue;
        const double e = d * d * warp;
        out[i] = d * e * std::pow(t, e - 1.0);
      }
      break;
    case PathKind::kPiecewiseLinear:
    case PathKind::kLShape: {
      const auto& w = p.waypoints();
      const std::size_t segs = w.size() - 1;
      const auto [k, u] = locate(segs, tau);
      if (u == 0.0 && k > 0) throw AtBreakpoint("t = " + std::to_string(t) + " is a corner of the path");
      const double scale = static_cast<double>(segs) * dtau;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * (w[k + 1][i] - w[k][i]);
      break;
    }
    case PathKind::kEnsemble:
      break;
  }
  return out;
}

PathSpec lshape_paths(LVariant variant) { return PathSpec::lshape(variant); }

bool is_monotone(const PathSpec& p, std::size_t samples) {
  if (p.kind() == PathKind::kEnsemble) {
    return std::all_of(p.members().begin(), p.members().end(),
                       [&](const auto& m) { return is_monotone(m.second, samples); });
  }
  if (!p.is_bound()) throw Unbound("path endpoints are not bound");
  samples = std::max<std::size_t>(samples, 2);
  const std::size_t n = p.dim();
  std::vector<bool> rises(n, false), falls(n, false);
  Vec prev = path_eval(p, 0.0);
  for (std::size_t k = 1; k < samples; ++k) {
    const double t = k + 1 == samples ? 1.0 : static_cast<double>(k) / static_cast<double>(samples - 1);
    Vec cur = path_eval(p, t);
    for (std::size_t i = 0; i < n; ++i) {
      if (cur[i] > prev[i]) rises[i] = true;
      if (cur[i] < prev[i]) falls[i] = true;
      if (rises[i] && falls[i]) return false;
    }
    prev = std::move(cur);
  }
  return true;
}

}  // namespace axiograd
