#include "axiograd/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "axiograd/errors.hpp"

namespace axiograd {
namespace {

constexpr double kGradeRatio = 0.25;
constexpr int kGradeLevels = 12;

GaussRule build_gauss(unsigned n) {
  GaussRule r{Vec(n), Vec(n)};
  const unsigned half = (n + 1) / 2;
  for (unsigned i = 0; i < half; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (unsigned k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      r.nodes[0] = 0.0;
      r.weights[0] = 2.0;
      break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1 && n > 1) r.nodes[n / 2] = 0.0;
  return r;
}

// Base panel edges of one segment: uniform panels with geometric grading
// inside the first and/or last panel.
Vec base_edges(const Segment& s, std::size_t panels) {
  Vec edges;
  const double h = (s.b - s.a) / static_cast<double>(panels);
  edges.push_back(s.a);
  if (s.grade_left) {
    for (int k = kGradeLevels; k >= 1; --k) edges.push_back(s.a + h * std::pow(kGradeRatio, k));
  }
  for (std::size_t k = 1; k < panels; ++k) edges.push_back(s.a + h * static_cast<double>(k));
  if (s.grade_right) {
    for (int k = 1; k <= kGradeLevels; ++k) edges.push_back(s.b - h * std::pow(kGradeRatio, k));
  }
  edges.push_back(s.b);
  return edges;
}

}  // namespace

QuadratureConfig QuadratureConfig::gauss_legendre(unsigned order) {
  QuadratureConfig c;
  c.order = order;
  return c;
}

QuadratureConfig QuadratureConfig::midpoint(unsigned points) {
  QuadratureConfig c;
  c.rule = QuadratureRule::kMidpoint;
  c.order = points;
  return c;
}

void QuadratureConfig::validate() const {
  if (rule == QuadratureRule::kGaussLegendre && order < 2) throw InvalidConfig("Gauss-Legendre order must be >= 2");
  if (rule == QuadratureRule::kMidpoint && order < 1) throw InvalidConfig("midpoint rule needs at least one point");
  if (order > 256) throw InvalidConfig("at most 256 nodes per panel");
  if (panels < 1) throw InvalidConfig("at least one panel is required");
  if (max_panels < panels) throw InvalidConfig("panel limit is below the initial panel count");
  if (!(tolerance > 0.0)) throw InvalidConfig("quadrature tolerance must be positive");
}

std::string to_string(QuadratureRule rule) {
  return rule == QuadratureRule::kGaussLegendre ? "gauss_legendre" : "midpoint";
}

const GaussRule& gauss_legendre_rule(unsigned n) {
  static std::mutex mu;
  static std::map<unsigned, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_gauss(n));
  return *slot;
}

QuadratureResult integrate(const std::vector<Segment>& segments, std::size_t width, const VectorIntegrand& f,
                           const QuadratureConfig& config) {
  config.validate();
  Vec nodes, weights;
  if (config.rule == QuadratureRule::kGaussLegendre) {
    const GaussRule& g = gauss_legendre_rule(config.order);
    nodes = g.nodes;
    weights = g.weights;
  } else {
    for (unsigned k = 0; k < config.order; ++k) {
      nodes.push_back(-1.0 + (2.0 * k + 1.0) / config.order);
      weights.push_back(2.0 / config.order);
    }
  }

  std::vector<Vec> edges;
  for (const auto& s : segments) {
    if (!(s.b > s.a)) continue;
    edges.push_back(base_edges(s, config.panels));
  }

  QuadratureResult out;
  Vec prev;
  Vec sample(width);
  for (std::size_t split = 1;; split *= 2) {
    Vec total(width, 0.0);
    for (const auto& e : edges) {
      for (std::size_t p = 0; p + 1 < e.size(); ++p) {
        const double h = (e[p + 1] - e[p]) / static_cast<double>(split);
        for (std::size_t s = 0; s < split; ++s) {
          const double lo = e[p] + h * static_cast<double>(s);
          const double mid = lo + 0.5 * h;
          Vec panel(width, 0.0);
          for (std::size_t k = 0; k < nodes.size(); ++k) {
            std::fill(sample.begin(), sample.end(), 0.0);
            f(mid + 0.5 * h * nodes[k], sample);
            for (std::size_t i = 0; i < width; ++i) panel[i] += weights[k] * sample[i];
          }
          for (std::size_t i = 0; i < width; ++i) total[i] += 0.5 * h * panel[i];
          out.evaluations += nodes.size();
        }
      }
    }
    ++out.levels;
    if (!prev.empty()) {
      const double change = max_abs_diff(total, prev);
      if (change < config.tolerance) {
        out.value = std::move(total);
        out.error_estimate = change;
        return out;
      }
      if (config.panels * split * 2 > config.max_panels) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "quadrature did not reach tolerance %g within %zu panels (last change %g)",
                      config.tolerance, config.max_panels, change);
        throw QuadratureDiverged(msg, change);
      }
    }
    prev = std::move(total);
  }
}

}  // namespace axiograd
