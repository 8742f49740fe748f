#include "axiograd/approx.hpp"

#include <algorithm>
#include <cmath>

#include "axiograd/errors.hpp"
#include "axiograd/random.hpp"
#include "axiograd/taylor.hpp"

namespace axiograd {
namespace {

template <typename T>
void require_increasing(const std::vector<T>& grid, const char* what) {
  if (grid.empty()) throw InvalidConfig(std::string(what) + " grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw InvalidConfig(std::string(what) + " grid must be strictly increasing");
  }
}

void fill_deltas(ConvergenceSeries& s) {
  const auto& a = s.attributions;
  s.deltas.assign(a.size(), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (s.reference) {
      s.deltas[k] = max_abs_diff(a[k].values, *s.reference);
    } else if (a.size() > 1) {
      s.deltas[k] = max_abs_diff(a[k].values, a[k == 0 ? 1 : k - 1].values);
    }
  }
}

}  // namespace

Vec default_alpha_grid() { return {1.0, 1e1, 1e2, 1e3, 1e4, 1e5}; }

ConvergenceSeries softplus_convergence_study(const LayeredNet& net, VecView x_bar, VecView x_prime,
                                             const Vec& alphas, const QuadratureConfig& q) {
  require_increasing(alphas, "alpha");
  ConvergenceSeries s;
  s.kind = "softplus";
  s.grid = alphas;
  const Model f(net);
  for (double alpha : alphas) s.attributions.push_back(ig(Model(softplus_smooth(net, alpha)), x_bar, x_prime, q));
  try {
    s.reference = ig(f, x_bar, x_prime, q).values;
  } catch (const NondifferentiablePath& e) {
    s.note = "reference ig undefined (" + std::string(e.what()) + "); deltas are successive differences";
  }
  const PathSpec path = PathSpec::straight().bound(Vec(x_bar.begin(), x_bar.end()), Vec(x_prime.begin(), x_prime.end()));
  const double fraction = path_differentiability_probe(f, path);
  if (!s.note.empty()) s.note += "; ";
  s.note += "sampled path differentiability " + format_double(fraction) +
            " (a sampled surrogate; the measure condition is not certified)";
  fill_deltas(s);
  return s;
}

Vec uniform_convergence_probe(const LayeredNet& net, const Vec& alphas, std::size_t samples, const Box& box,
                              std::uint64_t seed) {
  require_increasing(alphas, "alpha");
  if (box.dim() != net.input_dim() || !box.bounded()) {
    throw InvalidConfig("probe box must be bounded and match the network input");
  }
  std::vector<Vec> points;
  Vec center(box.dim());
  for (std::size_t i = 0; i < center.size(); ++i) center[i] = 0.5 * (box.lower()[i] + box.upper()[i]);
  points.push_back(std::move(center));
  Rng rng(seed);
  for (std::size_t k = 0; k < samples; ++k) {
    Vec x(box.dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(box.lower()[i], box.upper()[i]);
    points.push_back(std::move(x));
  }
  Vec exact(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) exact[k] = net.eval(points[k]);
  Vec sups;
  for (double alpha : alphas) {
    const LayeredNet smooth = softplus_smooth(net, alpha);
    double sup = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) sup = std::max(sup, std::abs(smooth.eval(points[k]) - exact[k]));
    sups.push_back(sup);
  }
  return sups;
}

ConvergenceSeries taylor_convergence_study(const AnalyticExpr& expr, VecView x_bar, VecView x_prime,
                                           const std::vector<unsigned>& orders, const QuadratureConfig& q) {
  require_increasing(orders, "order");
  if (x_bar.size() != x_prime.size()) throw DimensionMismatch("endpoints differ in length");
  const std::size_t n = x_bar.size();
  ConvergenceSeries s;
  s.kind = "taylor";
  for (unsigned l : orders) {
    s.grid.push_back(static_cast<double>(l));
    s.attributions.push_back(ig(Model(taylor(expr, x_prime, l), n), x_bar, x_prime, q));
  }
  s.reference = ig(Model(expr, n), x_bar, x_prime, q).values;
  fill_deltas(s);
  return s;
}

double path_differentiability_probe(const Model& model, const PathSpec& path, std::size_t samples) {
  if (samples == 0) throw InvalidConfig("probe needs at least one sample");
  if (path.kind() == PathKind::kEnsemble) throw EnsembleNotPointwise("probe a single path, not an ensemble");
  std::size_t smooth = 0;
  Vec g;
  std::vector<KinkUnit> kinks;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(samples);
    kinks.clear();
    model.gradient_at(path_eval(path, t), g, kinks);
    if (kinks.empty()) ++smooth;
  }
  return static_cast<double>(smooth) / static_cast<double>(samples);
}

Json series_to_json(const ConvergenceSeries& s) {
  Json attributions = Json::array();
  for (const auto& a : s.attributions) attributions.push_back(attribution_to_json(a));
  Json j{{"kind", s.kind},
         {"grid", s.grid},
         {"attributions", std::move(attributions)},
         {"deltas", s.deltas},
         {"reference", s.reference ? Json(*s.reference) : Json(nullptr)}};
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

ConvergenceSeries series_from_json(const Json& j) {
  try {
    ConvergenceSeries s;
    s.kind = j.at("kind").get<std::string>();
    s.grid = j.at("grid").get<Vec>();
    for (const auto& a : j.at("attributions")) s.attributions.push_back(attribution_from_json(a));
    s.deltas = j.at("deltas").get<Vec>();
    if (!j.at("reference").is_null()) s.reference = j.at("reference").get<Vec>();
    s.note = j.value("note", std::string{});
    return s;
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("malformed convergence series: ") + e.what());
  }
}

std::string series_csv(const ConvergenceSeries& s) {
  const std::size_t n = s.attributions.empty() ? 0 : s.attributions.front().values.size();
  std::string out = "param";
  for (std::size_t i = 0; i < n; ++i) out += ",A" + std::to_string(i + 1);
  out += ",delta,residual\n";
  for (std::size_t k = 0; k < s.attributions.size(); ++k) {
    out += format_double(s.grid[k]);
    for (double v : s.attributions[k].values) out += "," + format_double(v);
    out += "," + format_double(s.deltas[k]) + "," + format_double(s.attributions[k].residual) + "\n";
  }
  return out;
}

}  // namespace axiograd
