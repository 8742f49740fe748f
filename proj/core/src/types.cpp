#include "axiograd/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "axiograd/errors.hpp"

namespace axiograd {

NondifferentiableAt::NondifferentiableAt(std::vector<double> x, std::vector<KinkUnit> units)
    : Error("gradient undefined: " + std::to_string(units.size()) + " unit(s) at a kink"),
      point_(std::move(x)),
      units_(std::move(units)) {}

Box::Box(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw DimensionMismatch("box bounds have different lengths");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || !(lower_[i] < upper_[i])) {
      throw InvalidModel("box requires lower[i] < upper[i] for every i");
    }
  }
}

Box Box::unbounded(std::size_t dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return Box(Vec(dim, -inf), Vec(dim, inf));
}

Box Box::cube(std::size_t dim, double lo, double hi) { return Box(Vec(dim, lo), Vec(dim, hi)); }

bool Box::bounded() const noexcept {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) return false;
  }
  return true;
}

bool Box::contains(VecView x) const noexcept {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i])) return false;
    const double lo = lower_[i];
    const double hi = upper_[i];
    const double slack = std::isfinite(hi - lo) ? 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)}) : 0.0;
    if (x[i] < lo - slack || x[i] > hi + slack) return false;
  }
  return true;
}

Box Box::intersect(const Box& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("cannot intersect boxes of different dimension");
  Vec lo(dim()), hi(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    lo[i] = std::max(lower_[i], other.lower_[i]);
    hi[i] = std::min(upper_[i], other.upper_[i]);
  }
  return Box(std::move(lo), std::move(hi));
}

unsigned MultiIndex::one_norm() const noexcept {
  unsigned s = 0;
  for (unsigned m : exponents_) s += m;
  return s;
}

double MultiIndex::factorial_product() const {
  double p = 1.0;
  for (unsigned m : exponents_) p *= std::tgamma(static_cast<double>(m) + 1.0);
  return p;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) throw DimensionMismatch("ragged matrix rows");
    std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * m.cols_));
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Matrix::apply(VecView x) const {
  if (x.size() != cols_) throw DimensionMismatch("matrix-vector size mismatch");
  Vec y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

Vec Matrix::apply_transpose(VecView x) const {
  if (x.size() != rows_) throw DimensionMismatch("matrix-vector size mismatch");
  Vec y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) y[c] += (*this)(r, c) * x[r];
  }
  return y;
}

double max_abs(VecView v) noexcept {
  double m = 0.0;
  for (double x : v) {
    if (std::isnan(x)) return x;
    m = std::max(m, std::abs(x));
  }
  return m;
}

double max_abs_diff(VecView a, VecView b) {
  if (a.size() != b.size()) throw DimensionMismatch("vectors differ in length");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d)) return d;
    m = std::max(m, d);
  }
  return m;
}

}  // namespace axiograd
