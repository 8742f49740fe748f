#include "axiograd/max_expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace axiograd {
namespace {

MaxExpr::Node base_node(MaxOp op, std::vector<MaxExpr> args) {
  MaxExpr::Node n;
  n.op = op;
  n.args = std::move(args);
  for (const auto& a : n.args) n.min_dim = std::max(n.min_dim, a.min_dim());
  return n;
}

struct ValueGrad {
  double value = 0.0;
  Vec grad;
};

class TreeWalker {
 public:
  TreeWalker(VecView x, bool want_grad) : x_(x), want_grad_(want_grad) {}

  ValueGrad walk(const MaxExpr& e) {
    switch (e.op()) {
      case MaxOp::kInput: {
        ValueGrad r{x_[e.index()], {}};
        if (want_grad_) {
          r.grad.assign(x_.size(), 0.0);
          r.grad[e.index()] = 1.0;
        }
        return r;
      }
      case MaxOp::kConstant:
        return {e.constant_value(), want_grad_ ? Vec(x_.size(), 0.0) : Vec{}};
      case MaxOp::kAffine: {
        ValueGrad r{e.bias(), want_grad_ ? Vec(x_.size(), 0.0) : Vec{}};
        for (std::size_t k = 0; k < e.args().size(); ++k) {
          const ValueGrad c = walk(e.args()[k]);
          const double w = e.weights()[k];
          r.value += w * c.value;
          for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] += w * c.grad[i];
        }
        return r;
      }
      case MaxOp::kMax: {
        const std::size_t ordinal = ordinal_++;
        ValueGrad a = walk(e.args()[0]);
        ValueGrad b = walk(e.args()[1]);
        const double diff = a.value - b.value;
        signature.push_back(diff > 0.0 ? 1 : 0);
        if (std::abs(diff) < kKinkEpsilon) kinks.push_back({ordinal, 0});
        return diff > 0.0 ? std::move(a) : std::move(b);
      }
      case MaxOp::kUnsupported:
        throw UnsupportedNode("operator '" + e.op_name() + "' is not a max or affine node");
    }
    return {};
  }

  std::vector<unsigned char> signature;
  std::vector<KinkUnit> kinks;

 private:
  VecView x_;
  bool want_grad_;
  std::size_t ordinal_ = 0;
};

// Affine form over the units of one stage plus a constant.
struct Form {
  std::map<std::size_t, double> coef;
  double constant = 0.0;

  bool is_constant() const { return coef.empty(); }

  void add(const Form& other, double w) {
    for (const auto& [u, c] : other.coef) {
      const double v = (coef[u] += w * c);
      if (v == 0.0) coef.erase(u);
    }
    constant += w * other.constant;
  }
};

struct Unit {
  Form pre;
  Activation act;
};

class ReluCompiler {
 public:
  explicit ReluCompiler(std::size_t input_dim) : input_dim_(input_dim) {}

  LayeredNet compile(const MaxExpr& root) {
    const std::size_t depth = level(root);
    stages_.assign(depth + 1, {});
    const Form out = form(root, depth);

    std::vector<Layer> layers;
    std::size_t width = input_dim_;
    for (std::size_t s = 1; s <= depth; ++s) {
      const auto& units = stages_[s];
      AffineLayer aff{Matrix(units.size(), width), Vec(units.size(), 0.0)};
      ElementwiseLayer ew;
      for (std::size_t u = 0; u < units.size(); ++u) {
        for (const auto& [src, c] : units[u].pre.coef) aff.weight(u, src) = c;
        aff.bias[u] = units[u].pre.constant;
        ew.acts.push_back(units[u].act);
      }
      layers.emplace_back(std::move(aff));
      layers.emplace_back(std::move(ew));
      width = units.size();
    }
    AffineLayer head{Matrix(1, width), Vec{out.constant}};
    for (const auto& [src, c] : out.coef) head.weight(0, src) = c;
    layers.emplace_back(std::move(head));
    return LayeredNet(input_dim_, std::move(layers));
  }

 private:
  std::size_t level(const MaxExpr& e) {
    if (auto it = levels_.find(e.id()); it != levels_.end()) return it->second;
    std::size_t l = 0;
    switch (e.op()) {
      case MaxOp::kInput:
        if (e.index() >= input_dim_) throw DimensionMismatch("max expression references input beyond dimension");
        break;
      case MaxOp::kConstant:
        break;
      case MaxOp::kAffine:
        for (const auto& a : e.args()) l = std::max(l, level(a));
        break;
      case MaxOp::kMax:
        l = std::max(level(e.args()[0]), level(e.args()[1])) + 1;
        break;
      case MaxOp::kUnsupported:
        throw UnsupportedNode("operator '" + e.op_name() + "' cannot be rewritten with relu units");
    }
    levels_.emplace(e.id(), l);
    return l;
  }

  Form unit_form(std::size_t u) {
    Form f;
    f.coef[u] = 1.0;
    return f;
  }

  std::size_t add_unit(std::size_t stage, Form pre, Activation act) {
    stages_[stage].push_back({std::move(pre), act});
    return stages_[stage].size() - 1;
  }

  Form form(const MaxExpr& e, std::size_t stage) {
    const auto key = std::make_pair(e.id(), stage);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Form result;
    const std::size_t l = level(e);
    if (stage > l) {
      Form below = form(e, stage - 1);
      result = below.is_constant() ? below : unit_form(add_unit(stage, std::move(below), Activation::identity()));
    } else {
      switch (e.op()) {
        case MaxOp::kInput:
          result = unit_form(e.index());
          break;
        case MaxOp::kConstant:
          result.constant = e.constant_value();
          break;
        case MaxOp::kAffine:
          result.constant = e.bias();
          for (std::size_t k = 0; k < e.args().size(); ++k) result.add(form(e.args()[k], stage), e.weights()[k]);
          break;
        case MaxOp::kMax: {
          const Form a = form(e.args()[0], stage - 1);
          const Form b = form(e.args()[1], stage - 1);
          Form diff = a;
          diff.add(b, -1.0);
          result = unit_form(add_unit(stage, std::move(diff), Activation::relu()));
          if (b.is_constant()) {
            result.constant = b.constant;
          } else {
            result.coef[add_unit(stage, b, Activation::identity())] = 1.0;
          }
          break;
        }
        case MaxOp::kUnsupported:
          break;  // rejected in level()
      }
    }
    memo_.emplace(key, result);
    return result;
  }

  std::size_t input_dim_;
  std::vector<std::vector<Unit>> stages_;
  std::map<const MaxExpr::Node*, std::size_t> levels_;
  std::map<std::pair<const MaxExpr::Node*, std::size_t>, Form> memo_;
};

}  // namespace

MaxExpr MaxExpr::input(std::size_t index) {
  auto n = base_node(MaxOp::kInput, {});
  n.index = index;
  n.min_dim = index + 1;
  return MaxExpr(std::make_shared<const Node>(std::move(n)));
}

MaxExpr MaxExpr::constant(double c) {
  if (!std::isfinite(c)) throw InvalidModel("max expression constant must be finite");
  auto n = base_node(MaxOp::kConstant, {});
  n.value = c;
  return MaxExpr(std::make_shared<const Node>(std::move(n)));
}

MaxExpr MaxExpr::affine(std::vector<double> weights, std::vector<MaxExpr> args, double bias) {
  if (weights.size() != args.size()) throw InvalidModel("affine node needs one weight per argument");
  for (double w : weights) {
    if (!std::isfinite(w)) throw InvalidModel("affine weight must be finite");
  }
  if (!std::isfinite(bias)) throw InvalidModel("affine bias must be finite");
  auto n = base_node(MaxOp::kAffine, std::move(args));
  n.weights = std::move(weights);
  n.value = bias;
  return MaxExpr(std::make_shared<const Node>(std::move(n)));
}

MaxExpr MaxExpr::max(std::vector<MaxExpr> args) {
  if (args.empty()) throw InvalidModel("max needs at least one argument");
  MaxExpr acc = args.front();
  for (std::size_t k = 1; k < args.size(); ++k) {
    acc = MaxExpr(std::make_shared<const Node>(base_node(MaxOp::kMax, {acc, args[k]})));
  }
  return acc;
}

MaxExpr MaxExpr::unsupported(std::string op, std::vector<MaxExpr> args) {
  auto n = base_node(MaxOp::kUnsupported, std::move(args));
  n.name = std::move(op);
  return MaxExpr(std::make_shared<const Node>(std::move(n)));
}

MaxOp MaxExpr::op() const noexcept { return node_->op; }
std::size_t MaxExpr::index() const noexcept { return node_->index; }
double MaxExpr::constant_value() const noexcept { return node_->value; }
double MaxExpr::bias() const noexcept { return node_->value; }
const std::vector<double>& MaxExpr::weights() const noexcept { return node_->weights; }
const std::vector<MaxExpr>& MaxExpr::args() const noexcept { return node_->args; }
const std::string& MaxExpr::op_name() const noexcept { return node_->name; }
std::size_t MaxExpr::min_dim() const noexcept { return node_->min_dim; }

double MaxExpr::eval(VecView x) const {
  if (x.size() < min_dim()) throw DimensionMismatch("input shorter than max expression arity");
  TreeWalker w(x, false);
  return w.walk(*this).value;
}

MaxExpr::Gradient MaxExpr::gradient(VecView x) const {
  if (x.size() < min_dim()) throw DimensionMismatch("input shorter than max expression arity");
  TreeWalker w(x, true);
  ValueGrad r = w.walk(*this);
  return {std::move(r.grad), std::move(w.kinks)};
}

void MaxExpr::append_signature(VecView x, std::vector<unsigned char>& out) const {
  TreeWalker w(x, false);
  w.walk(*this);
  out.insert(out.end(), w.signature.begin(), w.signature.end());
}

std::size_t MaxExpr::max_count() const {
  std::size_t c = op() == MaxOp::kMax ? 1 : 0;
  for (const auto& a : args()) c += a.max_count();
  return c;
}

LayeredNet rewrite_max_to_relu(const MaxExpr& spec, std::size_t input_dim) {
  return ReluCompiler(input_dim).compile(spec);
}

}  // namespace axiograd
