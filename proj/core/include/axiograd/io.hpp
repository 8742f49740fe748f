#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "axiograd/attribution.hpp"
#include "axiograd/expr.hpp"
#include "axiograd/max_expr.hpp"
#include "axiograd/model.hpp"
#include "axiograd/net.hpp"
#include "axiograd/paths.hpp"
#include "axiograd/quadrature.hpp"

namespace axiograd {

using Json = nlohmann::json;

// Parse failures raise InvalidModel (models, expressions), InvalidPath
// (paths) or InvalidConfig (everything else).

Json expr_to_json(const AnalyticExpr& e);
AnalyticExpr expr_from_json(const Json& j);

Json max_expr_to_json(const MaxExpr& e);
MaxExpr max_expr_from_json(const Json& j);

Json activation_to_json(const Activation& a);
Activation activation_from_json(const Json& j);
Json layers_to_json(const LayeredNet& net);
LayeredNet net_from_json(std::size_t input_dim, const Json& layers);

Json box_to_json(const Box& b);
Box box_from_json(const Json& j, std::size_t dim);

/// {"dim", "box"?, and one of "expr", "layers", "max_expr", "monomial",
/// "combo", "composed"}
Json model_to_json(const Model& m);
Model model_from_json(const Json& j);
Model load_model(const std::filesystem::path& file);

Json path_to_json(const PathSpec& p);
PathSpec path_from_json(const Json& j);

Json quadrature_to_json(const QuadratureConfig& q);
QuadratureConfig quadrature_from_json(const Json& j);

Json attribution_to_json(const Attribution& a);
Attribution attribution_from_json(const Json& j);
std::string attribution_csv_header(std::size_t n);
std::string attribution_csv_row(const Attribution& a);

Json read_json_file(const std::filesystem::path& file);
/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace axiograd
