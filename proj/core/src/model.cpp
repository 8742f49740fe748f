#include "axiograd/model.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace axiograd {

struct Model::State {
  ModelKind kind = ModelKind::kExpression;
  std::size_t dim = 0;
  Box box;
  std::optional<AnalyticExpr> expr;
  std::optional<LayeredNet> net;
  std::optional<MaxExpr> tree;
  std::vector<std::pair<double, Model>> terms;
  std::vector<Model> inner;  // at most one
  Matrix map;
  Vec offset;
  std::size_t layers = 1;
  bool piecewise = false;
};

namespace {

Box resolve_box(Box box, std::size_t dim) {
  if (box.dim() == 0) return Box::unbounded(dim);
  if (box.dim() != dim) throw DimensionMismatch("box dimension does not match model dimension");
  return box;
}

}  // namespace

Model::Model(AnalyticExpr expr, std::size_t dim, Box box) {
  if (dim == 0) throw InvalidModel("model dimension must be positive");
  if (expr.min_dim() > dim) throw DimensionMismatch("expression references an input beyond the model dimension");
  auto s = std::make_shared<State>();
  s->kind = ModelKind::kExpression;
  s->dim = dim;
  s->box = resolve_box(std::move(box), dim);
  s->expr = std::move(expr);
  state_ = std::move(s);
}

Model::Model(LayeredNet net, Box box) {
  auto s = std::make_shared<State>();
  s->kind = ModelKind::kNetwork;
  s->dim = net.input_dim();
  s->box = resolve_box(std::move(box), s->dim);
  s->layers = net.layers().size();
  s->piecewise = net.has_switching_units();
  s->net = std::move(net);
  state_ = std::move(s);
}

Model::Model(MaxExpr tree, std::size_t dim, Box box) {
  if (dim == 0) throw InvalidModel("model dimension must be positive");
  if (tree.min_dim() > dim) throw DimensionMismatch("max tree references an input beyond the model dimension");
  auto s = std::make_shared<State>();
  s->kind = ModelKind::kMaxTree;
  s->dim = dim;
  s->box = resolve_box(std::move(box), dim);
  s->piecewise = tree.max_count() > 0;
  s->tree = std::move(tree);
  state_ = std::move(s);
}

Model Model::combination(std::vector<std::pair<double, Model>> terms) {
  if (terms.empty()) throw InvalidModel("combination needs at least one term");
  auto s = std::make_shared<State>();
  s->kind = ModelKind::kCombination;
  s->dim = terms.front().second.dim();
  s->box = terms.front().second.box();
  s->layers = 0;
  for (const auto& [c, m] : terms) {
    if (!std::isfinite(c)) throw InvalidModel("combination coefficient must be finite");
    if (m.dim() != s->dim) throw DimensionMismatch("combination members differ in dimension");
    s->box = s->box.intersect(m.box());
    s->layers += m.layer_count();
    s->piecewise = s->piecewise || m.piecewise();
  }
  s->terms = std::move(terms);
  return Model(std::shared_ptr<const State>(std::move(s)));
}

Model Model::composed(Model inner, Matrix map, Vec offset, Box box) {
  if (map.rows() != inner.dim() || offset.size() != inner.dim()) {
    throw DimensionMismatch("input map does not produce the inner model's dimension");
  }
  for (double v : map.data()) {
    if (!std::isfinite(v)) throw InvalidModel("input map must be finite");
  }
  auto s = std::make_shared<State>();
  s->kind = ModelKind::kComposed;
  s->dim = map.cols();
  s->box = resolve_box(std::move(box), s->dim);
  s->layers = inner.layer_count();
  s->piecewise = inner.piecewise();
  s->inner.push_back(std::move(inner));
  s->map = std::move(map);
  s->offset = std::move(offset);
  return Model(std::shared_ptr<const State>(std::move(s)));
}

ModelKind Model::kind() const noexcept { return state_->kind; }
std::size_t Model::dim() const noexcept { return state_->dim; }
const Box& Model::box() const noexcept { return state_->box; }
const AnalyticExpr* Model::expression() const noexcept { return state_->expr ? &*state_->expr : nullptr; }
const LayeredNet* Model::network() const noexcept { return state_->net ? &*state_->net : nullptr; }
const MaxExpr* Model::max_tree() const noexcept { return state_->tree ? &*state_->tree : nullptr; }
const std::vector<std::pair<double, Model>>* Model::terms() const noexcept {
  return state_->kind == ModelKind::kCombination ? &state_->terms : nullptr;
}
const Model* Model::inner() const noexcept { return state_->inner.empty() ? nullptr : &state_->inner.front(); }
const Matrix* Model::input_map() const noexcept {
  return state_->kind == ModelKind::kComposed ? &state_->map : nullptr;
}
const Vec* Model::input_offset() const noexcept {
  return state_->kind == ModelKind::kComposed ? &state_->offset : nullptr;
}
std::size_t Model::layer_count() const noexcept { return state_->layers; }
bool Model::piecewise() const noexcept { return state_->piecewise; }

double Model::value_at(VecView x) const {
  const State& s = *state_;
  switch (s.kind) {
    case ModelKind::kExpression: return s.expr->eval(x);
    case ModelKind::kNetwork: return s.net->eval(x);
    case ModelKind::kMaxTree: return s.tree->eval(x);
    case ModelKind::kCombination: {
      double acc = 0.0;
      for (const auto& [c, m] : s.terms) acc += c * m.value_at(x);
      return acc;
    }
    case ModelKind::kComposed: {
      Vec z = s.map.apply(x);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += s.offset[i];
      return s.inner.front().value_at(z);
    }
  }
  return 0.0;
}

void Model::gradient_at(VecView x, Vec& g, std::vector<KinkUnit>& kinks) const {
  const State& s = *state_;
  switch (s.kind) {
    case ModelKind::kExpression:
      g = s.expr->gradient(x);
      return;
    case ModelKind::kNetwork: {
      auto r = s.net->gradient(x);
      g = std::move(r.gradient);
      kinks.insert(kinks.end(), r.kinks.begin(), r.kinks.end());
      return;
    }
    case ModelKind::kMaxTree: {
      auto r = s.tree->gradient(x);
      g = std::move(r.gradient);
      kinks.insert(kinks.end(), r.kinks.begin(), r.kinks.end());
      return;
    }
    case ModelKind::kCombination: {
      g.assign(s.dim, 0.0);
      Vec part;
      for (const auto& [c, m] : s.terms) {
        m.gradient_at(x, part, kinks);
        for (std::size_t i = 0; i < s.dim; ++i) g[i] += c * part[i];
      }
      return;
    }
    case ModelKind::kComposed: {
      Vec z = s.map.apply(x);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += s.offset[i];
      Vec inner_g;
      s.inner.front().gradient_at(z, inner_g, kinks);
      g = s.map.apply_transpose(inner_g);
      return;
    }
  }
}

void Model::signature_at(VecView x, std::vector<unsigned char>& out) const {
  const State& s = *state_;
  if (!s.piecewise) return;
  switch (s.kind) {
    case ModelKind::kExpression: return;
    case ModelKind::kNetwork: s.net->append_signature(x, out); return;
    case ModelKind::kMaxTree: s.tree->append_signature(x, out); return;
    case ModelKind::kCombination:
      for (const auto& [c, m] : s.terms) m.signature_at(x, out);
      return;
    case ModelKind::kComposed: {
      Vec z = s.map.apply(x);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += s.offset[i];
      s.inner.front().signature_at(z, out);
      return;
    }
  }
}

void Model::check_input(VecView x) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("input has length " + std::to_string(x.size()) + ", model dimension is " +
                            std::to_string(dim()));
  }
  if (!box().contains(x)) throw OutOfDomain("input lies outside the model box");
}

double eval(const Model& model, VecView x) {
  model.check_input(x);
  return model.value_at(x);
}

}  // namespace axiograd
