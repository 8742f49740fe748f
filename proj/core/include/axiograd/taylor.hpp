#pragma once

#include <cstddef>

#include "axiograd/expr.hpp"
#include "axiograd/types.hpp"

namespace axiograd {

inline constexpr std::size_t kTaylorTermCap = 1'000'000;

/// Number of multi-indices m in n variables with |m|_1 <= order, saturating
/// at SIZE_MAX.
std::size_t taylor_term_count(std::size_t n, unsigned order) noexcept;

/// Taylor polynomial of `expr` of total degree `order` centered at x_prime,
/// returned as a sum of c_m [x - x']^m.
///
/// The coefficients D^m F(x') / [m]! come from truncated multivariate power
/// series propagated through the expression tree. Raises OrderTooLarge when
/// the number of coefficients exceeds max_terms.
AnalyticExpr taylor(const AnalyticExpr& expr, VecView x_prime, unsigned order,
                    std::size_t max_terms = kTaylorTermCap);

}  // namespace axiograd
