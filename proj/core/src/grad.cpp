#include "axiograd/grad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace axiograd {

double partial(const Model& model, std::size_t i, VecView x) {
  model.check_input(x);
  if (i >= model.dim()) throw DimensionMismatch("partial index " + std::to_string(i) + " out of range");
  if (const auto* e = model.expression()) return e->partial(x, i);
  GradResult r = grad(model, x);
  if (!r.differentiable) throw NondifferentiableAt(Vec(x.begin(), x.end()), std::move(r.kink_units));
  return r.gradient[i];
}

GradResult grad(const Model& model, VecView x) {
  model.check_input(x);
  GradResult r;
  model.gradient_at(x, r.gradient, r.kink_units);
  r.differentiable = r.kink_units.empty();
  return r;
}

double fd_check(const Model& model, VecView x, double h) {
  if (!(h > 0.0)) throw InvalidConfig("finite-difference step must be positive");
  const GradResult g = grad(model, x);
  if (!g.differentiable) throw NondifferentiableNearby("gradient point sits on a kink");
  std::vector<unsigned char> centre;
  model.signature_at(x, centre);
  Vec probe(x.begin(), x.end());
  std::vector<KinkUnit> kinks;
  std::vector<unsigned char> pattern;
  Vec scratch;
  auto probe_value = [&](std::size_t i) {
    model.check_input(probe);
    model.gradient_at(probe, scratch, kinks);
    pattern.clear();
    model.signature_at(probe, pattern);
    bool switched = false;
    for (std::size_t k = 0; k < centre.size(); ++k) switched = switched || (centre[k] < 2 && pattern[k] != centre[k]);
    if (!kinks.empty() || switched) {
      throw NondifferentiableNearby("a kink lies within the stencil for input " + std::to_string(i));
    }
    return model.value_at(probe);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = probe_value(i);
    probe[i] = x[i] - h;
    const double fm = probe_value(i);
    probe[i] = x[i];
    const double fd = (fp - fm) / (2.0 * h);
    const double dev = std::abs(fd - g.gradient[i]) / (1.0 + std::abs(g.gradient[i]));
    if (std::isnan(dev)) return dev;
    worst = std::max(worst, dev);
  }
  return worst;
}

}  // namespace axiograd
