#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <axiograd/expr.hpp>
#include <axiograd/max_expr.hpp>
#include <axiograd/model.hpp>
#include <axiograd/types.hpp>

namespace axiograd::testing {

using ScalarFn = std::function<double(VecView)>;
using GradientFn = std::function<Vec(VecView)>;

/// prod_i d_i^m_i by repeated multiplication.
double monomial_product(const std::vector<unsigned>& m, VecView d);

/// m_i / |m|_1 * [x_bar - x']^m, written out independently of the library.
Vec monomial_ig(const std::vector<unsigned>& m, VecView x_bar, VecView x_prime);

/// Shapley values from the subset formula
/// phi_i = sum_S |S|! (n - |S| - 1)! / n! * (v(S + i) - v(S)).
Vec subset_shapley(const ScalarFn& f, VecView x_bar, VecView x_prime);

/// Composite Simpson rule with `intervals` (even) sub-intervals applied to
/// A_i = int_0^1 g_i(x' + t d) d_i dt with a hand-coded gradient.
Vec simpson_ig(const GradientFn& g, VecView x_bar, VecView x_prime, std::size_t intervals = 2000);

/// Central differences with one Richardson step.
Vec richardson_gradient(const ScalarFn& f, VecView x, double h = 1e-3);

/// All exponent vectors in n variables with |m|_1 <= max_degree.
std::vector<std::vector<unsigned>> multi_indices(std::size_t n, unsigned max_degree);

/// max(x_1, x_2) as a max tree.
MaxExpr max2();
/// max(x_1, x_2) as a relu network.
Model max_net();
/// exp(x_1 + x_2).
AnalyticExpr exp_sum();

struct NamedModel {
  std::string name;
  Model model;
};

/// Fixed analytic models used by the gradient and completeness checks.
std::vector<NamedModel> analytic_models();

/// Path of a file under data/models.
std::string model_path(const std::string& name);

}  // namespace axiograd::testing
