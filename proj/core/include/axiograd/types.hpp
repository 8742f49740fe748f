#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace axiograd {

using Vec = std::vector<double>;
using VecView = std::span<const double>;

/// Pre-activations closer to zero than this are treated as ReLU kinks.
inline constexpr double kKinkEpsilon = 1e-12;

/// Axis-aligned hyper-rectangle [lower, upper].
class Box {
 public:
  Box() = default;
  Box(Vec lower, Vec upper);

  /// The box (-inf, inf)^n.
  static Box unbounded(std::size_t dim);
  /// The box [lo, hi]^n.
  static Box cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const noexcept { return lower_.size(); }
  const Vec& lower() const noexcept { return lower_; }
  const Vec& upper() const noexcept { return upper_; }
  bool bounded() const noexcept;
  double width(std::size_t i) const { return upper_[i] - lower_[i]; }

  /// Membership with a small relative slack that absorbs rounding on path
  /// points computed as x' + t (x - x').
  bool contains(VecView x) const noexcept;

  Box intersect(const Box& other) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  Vec lower_;
  Vec upper_;
};

/// Exponent vector m of a monomial [x - x']^m.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<unsigned> exponents) : exponents_(std::move(exponents)) {}

  std::size_t dim() const noexcept { return exponents_.size(); }
  const std::vector<unsigned>& exponents() const noexcept { return exponents_; }
  unsigned operator[](std::size_t i) const { return exponents_[i]; }

  unsigned one_norm() const noexcept;
  /// [m]! = m_1! ... m_n!
  double factorial_product() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<unsigned> exponents_;
};

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  static Matrix from_rows(const std::vector<Vec>& rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const Vec& data() const noexcept { return data_; }

  /// y = M x
  Vec apply(VecView x) const;
  /// y = M^T x
  Vec apply_transpose(VecView x) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

double max_abs(VecView v) noexcept;
double max_abs_diff(VecView a, VecView b);

}  // namespace axiograd
