#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "axiograd/expr.hpp"
#include "axiograd/max_expr.hpp"
#include "axiograd/model.hpp"
#include "axiograd/net.hpp"
#include "axiograd/random.hpp"
#include "axiograd/types.hpp"

namespace axiograd {

enum class ModelFamily { kPolynomial, kAnalytic, kTanhNet, kReluNet };

/// Seeded source of test functions and endpoints. Points are drawn from a
/// bounded box; generated models themselves are declared on all of R^n.
class CaseGenerator {
 public:
  CaseGenerator(std::uint64_t seed, std::size_t dim, Box box);
  CaseGenerator(std::uint64_t seed, std::size_t dim);  // box [-1, 1]^dim

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t dim() const noexcept { return dim_; }
  const Box& box() const noexcept { return box_; }
  Rng& rng() noexcept { return rng_; }

  Vec point();
  Vec point(const Box& b);
  /// Point in the box whose coordinates in `coords` differ from `from` by at
  /// least min_gap.
  Vec point_away(VecView from, const std::vector<std::size_t>& coords, double min_gap);

  /// sum of `terms` random monomials of total degree <= degree.
  AnalyticExpr polynomial(std::size_t n, unsigned degree, std::size_t terms);
  /// Polynomial plus sin, exp and tanh ridge terms.
  AnalyticExpr analytic(std::size_t n);
  LayeredNet tanh_net(std::size_t n, const std::vector<std::size_t>& widths);
  LayeredNet relu_net(std::size_t n, const std::vector<std::size_t>& widths);
  /// Nested maxima of random affine functions.
  MaxExpr max_tree(std::size_t n, int depth = 2);
  MultiIndex multi_index(std::size_t n, unsigned max_degree);

  Model model(std::size_t n, ModelFamily family);
  /// Family drawn at random; relu nets only when allow_relu.
  Model model(std::size_t n, bool allow_relu = false);

 private:
  AnalyticExpr ridge(std::size_t n);  // w . x + b with random w, b
  LayeredNet net(std::size_t n, const std::vector<std::size_t>& widths, Activation act);

  std::uint64_t seed_;
  std::size_t dim_;
  Box box_;
  Rng rng_;
};

}  // namespace axiograd
