#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include <axiograd/approx.hpp>
#include <axiograd/attribution.hpp>
#include <axiograd/axioms.hpp>
#include <axiograd/errors.hpp>
#include <axiograd/io.hpp>
#include <axiograd/model.hpp>

namespace axiograd::cli {
namespace {

/// Flags kept as text until the config file has been merged.
struct RawFlags {
  std::string config;
  std::string input;
  std::string baseline;
  std::string grid;
  std::string format;
  std::string rule;
  std::vector<std::string> pairs;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

Vec vector_from_json(const Json& j, const char* key) {
  if (j.is_string()) return parse_vector(j.get<std::string>());
  if (!j.is_array()) throw InvalidConfig(std::string("'") + key + "' must be an array or a comma-separated string");
  try {
    return j.get<Vec>();
  } catch (const Json::exception&) {
    throw InvalidConfig(std::string("'") + key + "' must hold numbers");
  }
}

std::pair<Vec, Vec> parse_pair(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw InvalidConfig("endpoint pair must read 'x_bar:x_prime'");
  return {parse_vector(text.substr(0, colon)), parse_vector(text.substr(colon + 1))};
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::kJson;
  if (s == "csv") return Format::kCsv;
  throw InvalidConfig("format must be json or csv");
}

QuadratureRule parse_rule(const std::string& s) {
  if (s == "gauss_legendre") return QuadratureRule::kGaussLegendre;
  if (s == "midpoint") return QuadratureRule::kMidpoint;
  throw InvalidConfig("quadrature rule must be gauss_legendre or midpoint");
}

class ConfigMerger {
 public:
  ConfigMerger(const Json& file, const CLI::App& sub, std::ostream& err) : file_(file), sub_(sub), err_(err) {}

  /// Takes the file value for `key`, warning when `flag` was also given with
  /// a different value.
  template <typename T, typename Parse>
  void take(const char* key, const char* flag, T& value, Parse parse) {
    if (!file_.contains(key)) return;
    T from_file = parse(file_.at(key));
    if (given(flag) && !(from_file == value)) warn(flag, key);
    value = std::move(from_file);
  }

  template <typename T>
  void take(const char* key, const char* flag, T& value) {
    take(key, flag, value, [key](const Json& j) {
      try {
        return j.get<T>();
      } catch (const Json::exception&) {
        throw InvalidConfig(std::string("config value '") + key + "' has the wrong type");
      }
    });
  }

  bool given(const char* flag) const { return flag != nullptr && sub_.count(flag) > 0; }
  void warn(const char* flag, const char* key) const {
    err_ << "warning: " << flag << " conflicts with '" << key << "' in the config file; using the file value\n";
  }

 private:
  const Json& file_;
  const CLI::App& sub_;
  std::ostream& err_;
};

void merge_config(RunConfig& cfg, RawFlags& raw, const CLI::App& sub, std::ostream& err) {
  const Json file = read_json_file(raw.config);
  if (!file.is_object()) throw InvalidConfig("config file must hold a JSON object");
  static const std::vector<std::string> known{
      "command", "model",  "method", "input",  "baseline",   "quadrature",  "seed",    "output",
      "format",  "axioms", "all",    "cases",  "dim",        "tol",         "secant_eps", "secant_grid",
      "threads", "endpoint_pairs",   "kind",   "grid"};
  for (const auto& [key, value] : file.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidConfig("unknown config key '" + key + "'");
    }
  }
  if (file.contains("command") && file.at("command") != sub.get_name()) {
    throw InvalidConfig("config file is for command '" + file.at("command").dump() + "'");
  }
  ConfigMerger m(file, sub, err);
  m.take("model", "--model", cfg.model);
  m.take("method", "--method", cfg.method);
  m.take("output", "--output", cfg.output);
  m.take("seed", "--seed", cfg.seed);
  m.take("format", "--format", raw.format);
  m.take("input", "--input", cfg.input, [](const Json& j) { return vector_from_json(j, "input"); });
  m.take("baseline", "--baseline", cfg.baseline, [](const Json& j) { return vector_from_json(j, "baseline"); });
  m.take("grid", "--grid", cfg.grid, [](const Json& j) { return vector_from_json(j, "grid"); });
  m.take("axioms", "--axiom", cfg.axioms);
  m.take("all", "--all", cfg.all);
  m.take("cases", "--cases", cfg.cases);
  m.take("dim", "--dim", cfg.dim);
  m.take("tol", "--tol", cfg.tol);
  m.take("secant_eps", "--secant-eps", cfg.secant_eps);
  m.take("secant_grid", "--secant-grid", cfg.secant_grid);
  m.take("threads", "--threads", cfg.threads);
  m.take("kind", "--kind", cfg.kind);
  if (file.contains("endpoint_pairs")) {
    std::vector<std::pair<Vec, Vec>> pairs;
    for (const auto& p : file.at("endpoint_pairs")) {
      if (!p.is_array() || p.size() != 2) throw InvalidConfig("endpoint_pairs entries are [x_bar, x_prime]");
      pairs.emplace_back(vector_from_json(p[0], "endpoint_pairs"), vector_from_json(p[1], "endpoint_pairs"));
    }
    if (m.given("--endpoint-pair") && pairs != cfg.endpoint_pairs) m.warn("--endpoint-pair", "endpoint_pairs");
    cfg.endpoint_pairs = std::move(pairs);
  }
  if (file.contains("quadrature")) {
    for (const char* flag : {"--quad-rule", "--quad-order", "--quad-panels", "--quad-max-panels", "--quad-tol"}) {
      if (m.given(flag)) m.warn(flag, "quadrature");
    }
    cfg.quadrature = quadrature_from_json(file.at("quadrature"));
  }
}

void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw InvalidConfig("cannot write '" + cfg.output + "'");
  f << text;
  if (!f) throw InvalidConfig("failed writing '" + cfg.output + "'");
}

void check_endpoints(const RunConfig& cfg, const Model& f) {
  if (cfg.input.size() != f.dim() || cfg.baseline.size() != f.dim()) {
    throw DimensionMismatch("--input and --baseline need " + std::to_string(f.dim()) + " values for this model");
  }
}

PathSpec named_path(std::string_view name) {
  if (name == "straight") return PathSpec::straight();
  if (name == "power") return PathSpec::power();
  if (name == "lshape-xy") return PathSpec::lshape(LVariant::kXY);
  if (name == "lshape-yx") return PathSpec::lshape(LVariant::kYX);
  return path_from_json(read_json_file(std::string(name)));
}

/// "straight=0.5,power=0.5" or a JSON file holding an ensemble path.
PathSpec ensemble_path(std::string_view spec) {
  if (spec.find('=') == std::string_view::npos) {
    PathSpec p = path_from_json(read_json_file(std::string(spec)));
    if (p.kind() != PathKind::kEnsemble) throw InvalidPath("'" + std::string(spec) + "' is not an ensemble path");
    return p;
  }
  std::vector<std::pair<double, PathSpec>> members;
  std::stringstream ss{std::string(spec)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidPath("ensemble members read 'path=weight'");
    const Vec w = parse_vector(item.substr(eq + 1));
    members.emplace_back(w.front(), named_path(trim(item.substr(0, eq))));
  }
  return PathSpec::ensemble(std::move(members));
}

Attribution attribute(const RunConfig& cfg, const Json& model_json, const Model& f) {
  const std::string& m = cfg.method;
  if (m == "ig") return ig(f, cfg.input, cfg.baseline, cfg.quadrature);
  if (m == "shapley") return shapley(f, cfg.input, cfg.baseline);
  if (m == "monomial-closed-form") {
    if (!model_json.contains("monomial")) throw InvalidConfig("monomial-closed-form needs a 'monomial' model");
    const Json& mj = model_json.at("monomial");
    const Vec center = mj.contains("center") ? mj.at("center").get<Vec>() : Vec(f.dim(), 0.0);
    if (center != cfg.baseline) throw InvalidConfig("monomial-closed-form needs the monomial centered at the baseline");
    return ig_monomial_closed_form(MultiIndex(mj.at("exponents").get<std::vector<unsigned>>()), cfg.input,
                                   cfg.baseline);
  }
  if (m.rfind("path:", 0) == 0) return path_attribution(f, named_path(m.substr(5)), cfg.input, cfg.baseline, cfg.quadrature);
  if (m.rfind("ensemble:", 0) == 0) {
    return ensemble_attribution(f, ensemble_path(m.substr(9)), cfg.input, cfg.baseline, cfg.quadrature);
  }
  throw InvalidConfig("unknown method '" + m + "' (ig, shapley, monomial-closed-form, path:<spec>, ensemble:<spec>)");
}

int cmd_attribute(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model.empty()) throw InvalidConfig("--model is required");
  const Json model_json = read_json_file(cfg.model);
  const Model f = model_from_json(model_json);
  check_endpoints(cfg, f);
  const Attribution a = attribute(cfg, model_json, f);
  if (cfg.format == Format::kCsv) {
    write_output(cfg, attribution_csv_header(a.values.size()) + "\n" + attribution_csv_row(a) + "\n", out);
  } else {
    write_output(cfg, attribution_to_json(a).dump(2) + "\n", out);
  }
  return kExitOk;
}

int cmd_axioms(const RunConfig& cfg, std::ostream& out) {
  const Method method = method_by_name(cfg.method, cfg.quadrature);
  std::vector<Axiom> selected;
  if (cfg.all) {
    selected = all_axioms();
  } else {
    for (const auto& id : cfg.axioms) {
      const auto a = axiom_from_id(id);
      if (!a) throw InvalidConfig("unknown axiom '" + id + "'");
      selected.push_back(*a);
    }
  }
  if (selected.empty()) throw InvalidConfig("select axioms with --axiom or --all");
  CheckOptions opt;
  opt.seed = cfg.seed;
  opt.dim = cfg.dim;
  opt.cases = cfg.cases;
  opt.tol = cfg.tol;
  opt.secant_eps = cfg.secant_eps;
  opt.secant_grid = cfg.secant_grid;
  opt.threads = cfg.threads;
  opt.endpoint_pairs = cfg.endpoint_pairs;

  bool failed = false;
  Json reports = Json::array();
  std::string csv = report_csv_header() + "\n";
  for (Axiom a : selected) {
    const AxiomReport r = check_axiom(a, method, opt);
    failed = failed || r.verdict == Verdict::kFail;
    reports.push_back(report_to_json(r));
    csv += report_csv_row(cfg.method, r) + "\n";
  }
  if (cfg.format == Format::kCsv) {
    write_output(cfg, csv, out);
  } else {
    const Json doc{{"method", cfg.method}, {"seed", cfg.seed}, {"reports", std::move(reports)}};
    write_output(cfg, doc.dump(2) + "\n", out);
  }
  return failed ? kExitAxiomFail : kExitOk;
}

int cmd_converge(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model.empty()) throw InvalidConfig("--model is required");
  const Model f = load_model(cfg.model);
  check_endpoints(cfg, f);
  ConvergenceSeries s;
  if (cfg.kind == "softplus") {
    const Vec alphas = cfg.grid.empty() ? default_alpha_grid() : cfg.grid;
    if (const LayeredNet* net = f.network()) {
      s = softplus_convergence_study(*net, cfg.input, cfg.baseline, alphas, cfg.quadrature);
    } else if (const MaxExpr* tree = f.max_tree()) {
      s = softplus_convergence_study(rewrite_max_to_relu(*tree, f.dim()), cfg.input, cfg.baseline, alphas,
                                     cfg.quadrature);
    } else {
      throw InvalidConfig("softplus convergence needs a network or max-tree model");
    }
  } else if (cfg.kind == "taylor") {
    const AnalyticExpr* expr = f.expression();
    if (expr == nullptr) throw InvalidConfig("taylor convergence needs an expression model");
    std::vector<unsigned> orders;
    if (cfg.grid.empty()) {
      for (unsigned l = 1; l <= 8; ++l) orders.push_back(l);
    }
    for (double g : cfg.grid) {
      if (!(g >= 0.0) || g != std::floor(g) || g > 64.0) throw InvalidConfig("taylor orders are integers in [0, 64]");
      orders.push_back(static_cast<unsigned>(g));
    }
    s = taylor_convergence_study(*expr, cfg.input, cfg.baseline, orders, cfg.quadrature);
  } else {
    throw InvalidConfig("--kind must be softplus or taylor");
  }
  write_output(cfg, cfg.format == Format::kCsv ? series_csv(s) : series_to_json(s).dump(2) + "\n", out);
  return kExitOk;
}

std::uint64_t parse_seed(std::string_view text) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw InvalidConfig("AXIOGRAD_SEED must be a non-negative integer");
  }
  return v;
}

}  // namespace

Vec parse_vector(std::string_view text) {
  Vec out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || p != item.data() + item.size()) {
      throw InvalidConfig("'" + std::string(text) + "' is not a comma-separated list of numbers");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const char* env_seed) {
  CLI::App app{"Path attributions, axiom checks and convergence studies for scalar models", "axiograd"};
  app.require_subcommand(1);
  RunConfig cfg;
  RawFlags raw;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", raw.config, "JSON run configuration; its values win over flags");
    sub->add_option("-o,--output", cfg.output, "Output file (default: standard output)");
    sub->add_option("--format", raw.format, "json or csv");
    sub->add_option("--seed", cfg.seed, "Case generator seed; AXIOGRAD_SEED overrides it");
    sub->add_option("--quad-rule", raw.rule, "gauss_legendre or midpoint");
    sub->add_option("--quad-order", cfg.quadrature.order, "Nodes per panel");
    sub->add_option("--quad-panels", cfg.quadrature.panels, "Initial panels per segment");
    sub->add_option("--quad-max-panels", cfg.quadrature.max_panels, "Panel limit per segment");
    sub->add_option("--quad-tol", cfg.quadrature.tolerance, "Absolute tolerance");
  };
  auto endpoints = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "Model JSON file");
    sub->add_option("--input", raw.input, "x_bar, comma-separated");
    sub->add_option("--baseline", raw.baseline, "x', comma-separated");
  };

  CLI::App* attr = app.add_subcommand("attribute", "Attribute F(x_bar) - F(x') to the inputs");
  common(attr);
  endpoints(attr);
  attr->add_option("--method", cfg.method,
                   "ig, shapley, monomial-closed-form, path:<straight|power|lshape-xy|lshape-yx|file>, "
                   "ensemble:<file|name=weight,...>");

  CLI::App* ax = app.add_subcommand("axioms", "Check attribution axioms on generated cases");
  common(ax);
  ax->add_option("--method", cfg.method, "Built-in method name");
  ax->add_option("--axiom", cfg.axioms, "Axiom id (repeatable)");
  ax->add_flag("--all", cfg.all, "Check every axiom");
  ax->add_option("--cases", cfg.cases, "Cases per axiom");
  ax->add_option("--dim", cfg.dim, "Input dimension of generated cases");
  ax->add_option("--tol", cfg.tol, "Violation tolerance");
  ax->add_option("--secant-eps", cfg.secant_eps, "Secant step bound for c0-symmetric-monotonicity");
  ax->add_option("--secant-grid", cfg.secant_grid, "Secant grid points for c0-symmetric-monotonicity");
  ax->add_option("--threads", cfg.threads, "Worker threads (0: one per hardware thread)");
  ax->add_option("--endpoint-pair", raw.pairs, "Designated strong-symmetry pair 'x_bar:x_prime' (repeatable)");

  CLI::App* conv = app.add_subcommand("converge", "Softplus or Taylor convergence study");
  common(conv);
  endpoints(conv);
  conv->add_option("--kind", cfg.kind, "softplus or taylor");
  conv->add_option("--grid", raw.grid, "alphas or Taylor orders, comma-separated and increasing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    CLI::App* sub = attr->parsed() ? attr : (ax->parsed() ? ax : conv);
    cfg.command = sub == attr ? Command::kAttribute : (sub == ax ? Command::kAxioms : Command::kConverge);
    if (!raw.input.empty()) cfg.input = parse_vector(raw.input);
    if (!raw.baseline.empty()) cfg.baseline = parse_vector(raw.baseline);
    if (!raw.grid.empty()) cfg.grid = parse_vector(raw.grid);
    if (!raw.rule.empty()) cfg.quadrature.rule = parse_rule(raw.rule);
    for (const auto& p : raw.pairs) cfg.endpoint_pairs.push_back(parse_pair(p));
    if (!raw.config.empty()) merge_config(cfg, raw, *sub, err);
    cfg.format = raw.format.empty() ? (cfg.command == Command::kConverge ? Format::kCsv : Format::kJson)
                                    : parse_format(raw.format);
    if (env_seed != nullptr && *env_seed != '\0') cfg.seed = parse_seed(env_seed);
    cfg.quadrature.validate();

    switch (cfg.command) {
      case Command::kAttribute: return cmd_attribute(cfg, out);
      case Command::kAxioms: return cmd_axioms(cfg, out);
      case Command::kConverge: return cmd_converge(cfg, out);
    }
  } catch (const NondifferentiablePath& e) {
    err << "error: attribution undefined: " << e.what() << "\n";
    return kExitUndefined;
  } catch (const QuadratureDiverged& e) {
    err << "error: attribution undefined: " << e.what() << "\n";
    return kExitUndefined;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace axiograd::cli
