#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "axiograd/errors.hpp"
#include "axiograd/expr.hpp"
#include "axiograd/max_expr.hpp"
#include "axiograd/net.hpp"
#include "axiograd/types.hpp"

namespace axiograd {

enum class ModelKind { kExpression, kNetwork, kMaxTree, kCombination, kComposed };

/// A scalar function on a box in R^n.
///
/// Wraps an analytic expression, a layered network or a max tree, and the two
/// derived forms the axiom harness needs: linear combinations of models and
/// composition with an affine input map. Copies share the underlying data.
class Model {
 public:
  Model(AnalyticExpr expr, std::size_t dim, Box box = {});
  explicit Model(LayeredNet net, Box box = {});
  Model(MaxExpr tree, std::size_t dim, Box box = {});

  /// sum_k coef_k F_k on the intersection of the member boxes.
  static Model combination(std::vector<std::pair<double, Model>> terms);
  /// x -> inner(map x + offset), declared on `box`.
  static Model composed(Model inner, Matrix map, Vec offset, Box box);

  ModelKind kind() const noexcept;
  std::size_t dim() const noexcept;
  const Box& box() const noexcept;

  /// Null unless kind() matches.
  const AnalyticExpr* expression() const noexcept;
  const LayeredNet* network() const noexcept;
  const MaxExpr* max_tree() const noexcept;
  const std::vector<std::pair<double, Model>>* terms() const noexcept;
  const Model* inner() const noexcept;
  const Matrix* input_map() const noexcept;
  const Vec* input_offset() const noexcept;

  /// Number of layers in the implementation; 1 for expressions and the sum of
  /// member depths for derived models.
  std::size_t layer_count() const noexcept;
  /// True when the model has relu, softplus or max units whose on/off pattern
  /// can switch along a path.
  bool piecewise() const noexcept;

  // Box and length checks are the caller's job.
  double value_at(VecView x) const;
  void gradient_at(VecView x, Vec& g, std::vector<KinkUnit>& kinks) const;
  /// Appends the on/off pattern of every switching unit: 0 or 1 for relu and
  /// max units, 2 or 3 for softplus units.
  void signature_at(VecView x, std::vector<unsigned char>& out) const;

  void check_input(VecView x) const;

  struct State;

 private:
  explicit Model(std::shared_ptr<const State> s) : state_(std::move(s)) {}
  std::shared_ptr<const State> state_;
};

/// F(x); raises DimensionMismatch or OutOfDomain.
double eval(const Model& model, VecView x);

}  // namespace axiograd
