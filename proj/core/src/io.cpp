#include "axiograd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace axiograd {
namespace {

struct MissingField : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class E, class F>
auto wrap(const char* what, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& ex) {
    throw E(std::string(what) + ": " + ex.what());
  } catch (const MissingField& ex) {
    throw E(std::string(what) + ": " + ex.what());
  }
}

Vec vec_from(const Json& j) { return j.get<Vec>(); }

Json vec_json(VecView v) { return Json(Vec(v.begin(), v.end())); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw MissingField(std::string("missing '") + key + "'");
  return j.at(key);
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r)));
  return rows;
}

Matrix matrix_from_json(const Json& j) { return Matrix::from_rows(j.get<std::vector<Vec>>()); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Expressions.

Json expr_to_json(const AnalyticExpr& e) {
  Json j;
  j["op"] = std::string(to_string(e.op()));
  switch (e.op()) {
    case ExprOp::kConstant:
      j["value"] = e.scalar();
      return j;
    case ExprOp::kVariable:
      j["index"] = e.index();
      return j;
    case ExprOp::kScale:
      j["factor"] = e.scalar();
      break;
    case ExprOp::kPower:
      j["exponent"] = e.exponent();
      break;
    case ExprOp::kSoftplus:
      j["alpha"] = e.scalar();
      break;
    default:
      break;
  }
  Json args = Json::array();
  for (const auto& a : e.args()) args.push_back(expr_to_json(a));
  j["args"] = std::move(args);
  return j;
}

AnalyticExpr expr_from_json(const Json& j) {
  return wrap<InvalidModel>("expression", [&]() -> AnalyticExpr {
    const std::string op = field(j, "op").get<std::string>();
    std::vector<AnalyticExpr> args;
    if (j.contains("args")) {
      for (const auto& a : j.at("args")) args.push_back(expr_from_json(a));
    }
    auto unary = [&]() -> AnalyticExpr {
      if (args.size() != 1) throw InvalidModel("operator '" + op + "' takes one argument");
      return args.front();
    };
    if (op == "const") return AnalyticExpr::constant(field(j, "value").get<double>());
    if (op == "var") return AnalyticExpr::variable(field(j, "index").get<std::size_t>());
    if (op == "add") return AnalyticExpr::sum(std::move(args));
    if (op == "mul") return AnalyticExpr::product(std::move(args));
    if (op == "scale") return AnalyticExpr::scale(field(j, "factor").get<double>(), unary());
    if (op == "pow") return AnalyticExpr::power(unary(), field(j, "exponent").get<int>());
    if (op == "exp") return AnalyticExpr::exp(unary());
    if (op == "log") return AnalyticExpr::log(unary());
    if (op == "sin") return AnalyticExpr::sin(unary());
    if (op == "cos") return AnalyticExpr::cos(unary());
    if (op == "sigmoid") return AnalyticExpr::sigmoid(unary());
    if (op == "tanh") return AnalyticExpr::tanh(unary());
    if (op == "softplus") return AnalyticExpr::softplus(unary(), field(j, "alpha").get<double>());
    throw InvalidModel("unknown expression operator '" + op + "'");
  });
}

// Max trees.

Json max_expr_to_json(const MaxExpr& e) {
  Json j;
  switch (e.op()) {
    case MaxOp::kInput:
      return {{"op", "var"}, {"index", e.index()}};
    case MaxOp::kConstant:
      return {{"op", "const"}, {"value", e.constant_value()}};
    case MaxOp::kAffine:
      j["op"] = "affine";
      j["weights"] = e.weights();
      j["bias"] = e.bias();
      break;
    case MaxOp::kMax:
      j["op"] = "max";
      break;
    case MaxOp::kUnsupported:
      j["op"] = e.op_name();
      break;
  }
  Json args = Json::array();
  for (const auto& a : e.args()) args.push_back(max_expr_to_json(a));
  j["args"] = std::move(args);
  return j;
}

MaxExpr max_expr_from_json(const Json& j) {
  return wrap<InvalidModel>("max expression", [&]() -> MaxExpr {
    const std::string op = field(j, "op").get<std::string>();
    std::vector<MaxExpr> args;
    if (j.contains("args")) {
      for (const auto& a : j.at("args")) args.push_back(max_expr_from_json(a));
    }
    if (op == "var") return MaxExpr::input(field(j, "index").get<std::size_t>());
    if (op == "const") return MaxExpr::constant(field(j, "value").get<double>());
    if (op == "affine") {
      return MaxExpr::affine(field(j, "weights").get<Vec>(), std::move(args), j.value("bias", 0.0));
    }
    if (op == "add") {
      Vec ones(args.size(), 1.0);
      return MaxExpr::affine(std::move(ones), std::move(args), 0.0);
    }
    if (op == "max") return MaxExpr::max(std::move(args));
    return MaxExpr::unsupported(op, std::move(args));
  });
}

// Networks.

Json activation_to_json(const Activation& a) {
  switch (a.kind) {
    case ActKind::kIdentity: return "identity";
    case ActKind::kRelu: return "relu";
    case ActKind::kSigmoid: return "sigmoid";
    case ActKind::kTanh: return "tanh";
    case ActKind::kSoftplus: return {{"act", "softplus"}, {"alpha", a.alpha}};
  }
  return "identity";
}

Activation activation_from_json(const Json& j) {
  return wrap<InvalidModel>("activation", [&]() -> Activation {
    std::string name;
    double alpha = 1.0;
    if (j.is_string()) {
      name = j.get<std::string>();
      // Also accept "softplus(a)".
      if (name.rfind("softplus(", 0) == 0 && name.back() == ')') {
        const std::string num = name.substr(9, name.size() - 10);
        const auto res = std::from_chars(num.data(), num.data() + num.size(), alpha);
        if (res.ec != std::errc() || res.ptr != num.data() + num.size()) {
          throw InvalidModel("cannot read softplus alpha from '" + name + "'");
        }
        name = "softplus";
      }
    } else {
      name = field(j, "act").get<std::string>();
      alpha = j.value("alpha", 1.0);
    }
    if (name == "identity") return Activation::identity();
    if (name == "relu") return Activation::relu();
    if (name == "sigmoid") return Activation::sigmoid();
    if (name == "tanh") return Activation::tanh();
    if (name == "softplus") {
      if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidAlpha("softplus alpha must be positive and finite");
      return Activation::softplus(alpha);
    }
    throw InvalidModel("unknown activation '" + name + "'");
  });
}

Json layers_to_json(const LayeredNet& net) {
  Json layers = Json::array();
  for (const auto& layer : net.layers()) {
    if (const auto* aff = std::get_if<AffineLayer>(&layer)) {
      layers.push_back({{"type", "affine"}, {"W", matrix_to_json(aff->weight)}, {"b", aff->bias}});
    } else {
      Json acts = Json::array();
      for (const auto& a : std::get<ElementwiseLayer>(layer).acts) acts.push_back(activation_to_json(a));
      layers.push_back({{"type", "elementwise"}, {"acts", std::move(acts)}});
    }
  }
  return layers;
}

LayeredNet net_from_json(std::size_t input_dim, const Json& layers) {
  return wrap<InvalidModel>("layers", [&]() -> LayeredNet {
    std::vector<Layer> out;
    for (const auto& l : layers) {
      const std::string type = field(l, "type").get<std::string>();
      if (type == "affine") {
        Matrix w = matrix_from_json(field(l, "W"));
        Vec b = l.contains("b") ? vec_from(l.at("b")) : Vec(w.rows(), 0.0);
        out.emplace_back(AffineLayer{std::move(w), std::move(b)});
      } else if (type == "elementwise") {
        ElementwiseLayer ew;
        for (const auto& a : field(l, "acts")) ew.acts.push_back(activation_from_json(a));
        out.emplace_back(std::move(ew));
      } else {
        throw InvalidModel("unknown layer type '" + type + "'");
      }
    }
    return LayeredNet(input_dim, std::move(out));
  });
}

// Models.

Json box_to_json(const Box& b) {
  Json lo = Json::array(), hi = Json::array();
  for (std::size_t i = 0; i < b.dim(); ++i) {
    lo.push_back(std::isfinite(b.lower()[i]) ? Json(b.lower()[i]) : Json(nullptr));
    hi.push_back(std::isfinite(b.upper()[i]) ? Json(b.upper()[i]) : Json(nullptr));
  }
  return {{"lower", std::move(lo)}, {"upper", std::move(hi)}};
}

Box box_from_json(const Json& j, std::size_t dim) {
  return wrap<InvalidModel>("box", [&]() -> Box {
    const double inf = std::numeric_limits<double>::infinity();
    auto read = [&](const char* key, double missing) {
      Vec v;
      for (const auto& x : field(j, key)) v.push_back(x.is_null() ? missing : x.get<double>());
      return v;
    };
    Box b(read("lower", -inf), read("upper", inf));
    if (b.dim() != dim) throw DimensionMismatch("box dimension does not match model dimension");
    return b;
  });
}

Json model_to_json(const Model& m) {
  Json j;
  j["dim"] = m.dim();
  if (m.box() != Box::unbounded(m.dim())) j["box"] = box_to_json(m.box());
  switch (m.kind()) {
    case ModelKind::kExpression:
      j["expr"] = expr_to_json(*m.expression());
      break;
    case ModelKind::kNetwork:
      j["layers"] = layers_to_json(*m.network());
      break;
    case ModelKind::kMaxTree:
      j["max_expr"] = max_expr_to_json(*m.max_tree());
      break;
    case ModelKind::kCombination: {
      Json terms = Json::array();
      for (const auto& [c, sub] : *m.terms()) terms.push_back({{"coef", c}, {"model", model_to_json(sub)}});
      j["combo"] = std::move(terms);
      break;
    }
    case ModelKind::kComposed:
      j["composed"] = {{"inner", model_to_json(*m.inner())},
                       {"map", matrix_to_json(*m.input_map())},
                       {"offset", *m.input_offset()}};
      break;
  }
  return j;
}

Model model_from_json(const Json& j) {
  return wrap<InvalidModel>("model", [&]() -> Model {
    if (!j.is_object()) throw InvalidModel("model must be a JSON object");
    int forms = 0;
    for (const char* key : {"expr", "layers", "max_expr", "monomial", "combo", "composed"}) forms += j.contains(key);
    if (forms != 1) {
      throw InvalidModel("model needs exactly one of expr, layers, max_expr, monomial, combo, composed");
    }
    std::size_t dim = 0;
    if (j.contains("dim")) {
      dim = j.at("dim").get<std::size_t>();
    } else if (j.contains("monomial")) {
      dim = field(j.at("monomial"), "exponents").size();
    } else {
      throw InvalidModel("model is missing 'dim'");
    }
    if (dim == 0) throw InvalidModel("model dimension must be positive");
    Box box = j.contains("box") ? box_from_json(j.at("box"), dim) : Box::unbounded(dim);

    if (j.contains("expr")) return Model(expr_from_json(j.at("expr")), dim, box);
    if (j.contains("layers")) return Model(net_from_json(dim, j.at("layers")), box);
    if (j.contains("max_expr")) return Model(max_expr_from_json(j.at("max_expr")), dim, box);
    if (j.contains("monomial")) {
      const Json& mj = j.at("monomial");
      MultiIndex m(field(mj, "exponents").get<std::vector<unsigned>>());
      if (m.dim() != dim) throw DimensionMismatch("monomial exponents do not match 'dim'");
      const Vec center = mj.contains("center") ? vec_from(mj.at("center")) : Vec(dim, 0.0);
      return Model(monomial(m, center), dim, box);
    }
    if (j.contains("combo")) {
      std::vector<std::pair<double, Model>> terms;
      for (const auto& t : j.at("combo")) terms.emplace_back(field(t, "coef").get<double>(), model_from_json(field(t, "model")));
      Model combo = Model::combination(std::move(terms));
      if (combo.dim() != dim) throw DimensionMismatch("combination members do not match 'dim'");
      if (combo.box() != box) throw InvalidModel("a combination's box is the intersection of its members' boxes");
      return combo;
    }
    const Json& c = j.at("composed");
    Matrix map = matrix_from_json(field(c, "map"));
    if (map.cols() != dim) throw DimensionMismatch("input map does not match 'dim'");
    return Model::composed(model_from_json(field(c, "inner")), std::move(map), vec_from(field(c, "offset")), box);
  });
}

Json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidConfig("cannot open '" + file.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& ex) {
    throw InvalidConfig("'" + file.string() + "' is not valid JSON: " + ex.what());
  }
}

Model load_model(const std::filesystem::path& file) { return model_from_json(read_json_file(file)); }

// Paths.

Json path_to_json(const PathSpec& p) {
  Json j;
  switch (p.kind()) {
    case PathKind::kStraight:
      j["kind"] = "straight";
      break;
    case PathKind::kPower:
      j["kind"] = "power";
      break;
    case PathKind::kPiecewiseLinear:
      j["kind"] = "piecewise_linear";
      j["waypoints"] = p.waypoints();
      break;
    case PathKind::kLShape:
      j["kind"] = "lshape";
      j["variant"] = p.variant() == LVariant::kXY ? "xy" : "yx";
      break;
    case PathKind::kEnsemble: {
      j["kind"] = "ensemble";
      Json members = Json::array();
      for (const auto& [w, m] : p.members()) members.push_back({{"weight", w}, {"path", path_to_json(m)}});
      j["members"] = std::move(members);
      return j;
    }
  }
  if (p.warp() != 1.0) j["warp"] = p.warp();
  return j;
}

PathSpec path_from_json(const Json& j) {
  return wrap<InvalidPath>("path", [&]() -> PathSpec {
    const std::string kind = field(j, "kind").get<std::string>();
    PathSpec p;
    if (kind == "straight") {
      p = PathSpec::straight();
    } else if (kind == "power") {
      p = PathSpec::power();
    } else if (kind == "piecewise_linear") {
      p = PathSpec::piecewise_linear(field(j, "waypoints").get<std::vector<Vec>>());
    } else if (kind == "lshape") {
      const std::string v = j.value("variant", std::string("xy"));
      if (v != "xy" && v != "yx") throw InvalidPath("lshape variant must be xy or yx");
      p = PathSpec::lshape(v == "xy" ? LVariant::kXY : LVariant::kYX);
    } else if (kind == "ensemble") {
      std::vector<std::pair<double, PathSpec>> members;
      for (const auto& m : field(j, "members")) {
        members.emplace_back(field(m, "weight").get<double>(), path_from_json(field(m, "path")));
      }
      return PathSpec::ensemble(std::move(members));
    } else {
      throw InvalidPath("unknown path kind '" + kind + "'");
    }
    if (j.contains("warp")) p = p.warped(j.at("warp").get<double>());
    return p;
  });
}

// Quadrature and attributions.

Json quadrature_to_json(const QuadratureConfig& q) {
  return {{"rule", to_string(q.rule)},
          {"order", q.order},
          {"panels", q.panels},
          {"max_panels", q.max_panels},
          {"tolerance", q.tolerance}};
}

QuadratureConfig quadrature_from_json(const Json& j) {
  return wrap<InvalidConfig>("quadrature", [&]() -> QuadratureConfig {
    QuadratureConfig q;
    const std::string rule = j.value("rule", std::string("gauss_legendre"));
    if (rule == "gauss_legendre") {
      q.rule = QuadratureRule::kGaussLegendre;
    } else if (rule == "midpoint") {
      q.rule = QuadratureRule::kMidpoint;
    } else {
      throw InvalidConfig("unknown quadrature rule '" + rule + "'");
    }
    q.order = j.value("order", q.order);
    q.panels = j.value("panels", q.panels);
    q.max_panels = j.value("max_panels", q.max_panels);
    q.tolerance = j.value("tolerance", q.tolerance);
    q.validate();
    return q;
  });
}

Json attribution_to_json(const Attribution& a) {
  return {{"values", a.values}, {"method", a.method}, {"residual", a.residual}, {"quad_error", a.quad_error}};
}

Attribution attribution_from_json(const Json& j) {
  return wrap<InvalidConfig>("attribution", [&]() -> Attribution {
    Attribution a;
    a.values = field(j, "values").get<Vec>();
    a.method = field(j, "method").get<std::string>();
    a.residual = field(j, "residual").get<double>();
    a.quad_error = field(j, "quad_error").get<double>();
    return a;
  });
}

std::string attribution_csv_header(std::size_t n) {
  std::string h = "method";
  for (std::size_t i = 0; i < n; ++i) h += ",A" + std::to_string(i + 1);
  return h + ",residual,quad_error";
}

std::string attribution_csv_row(const Attribution& a) {
  std::string row = a.method;
  for (double v : a.values) row += "," + format_double(v);
  return row + "," + format_double(a.residual) + "," + format_double(a.quad_error);
}

}  // namespace axiograd
