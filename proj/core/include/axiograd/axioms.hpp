#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "axiograd/attribution.hpp"
#include "axiograd/cases.hpp"
#include "axiograd/io.hpp"
#include "axiograd/model.hpp"
#include "axiograd/quadrature.hpp"

namespace axiograd {

/// An attribution method under test: (F, x_bar, x') -> A. Raising
/// MethodUndefined, NondifferentiablePath, QuadratureDiverged, WrongDimension
/// or TooManyInputs marks a case as outside the method's domain. Checks call
/// the method from several threads unless CheckOptions::threads is 1.
using Method = std::function<Attribution(const Model&, VecView, VecView)>;

enum class Axiom {
  kCompleteness,
  kLinearity,
  kDummy,
  kNdp,
  kSymmetryPreserving,
  kStrongSymmetry,
  kAsi,
  kProportionality,
  kSymmetricMonotonicity,
  kC0SymmetricMonotonicity,
  kImplementationInvariance,
  kMonomialDistribution,
};

std::string_view axiom_id(Axiom a) noexcept;
std::optional<Axiom> axiom_from_id(std::string_view id) noexcept;
const std::vector<Axiom>& all_axioms();

enum class Verdict { kPass, kFail, kInapplicable };

std::string_view to_string(Verdict v) noexcept;
Verdict verdict_from_string(std::string_view s);

struct CheckOptions {
  std::uint64_t seed = 42;
  std::size_t dim = 3;
  std::size_t cases = 200;
  double tol = 1e-6;
  double secant_eps = 1e-3;
  std::size_t secant_grid = 21;
  std::size_t threads = 0;  // 0: one per hardware thread
  /// Strong symmetry only: (x_bar, x') pairs in two inputs checked instead of
  /// random endpoints.
  std::vector<std::pair<Vec, Vec>> endpoint_pairs;
};

struct AxiomReport {
  std::string axiom;
  Verdict verdict = Verdict::kInapplicable;
  double worst = 0.0;
  /// Worst case with its violation; null when no case was applicable.
  Json witness;
  std::size_t cases = 0;
  std::size_t inapplicable = 0;
  std::uint64_t seed = 0;
  std::string note;
};

Json report_to_json(const AxiomReport& r);
AxiomReport report_from_json(const Json& j);
std::string report_csv_header();
std::string report_csv_row(std::string_view method, const AxiomReport& r);

// Each check draws its cases from `gen` (points in gen.box(), dimension
// gen.dim()) and reports the largest violation over applicable cases.
AxiomReport check_completeness(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_linearity(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_dummy(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_ndp(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_symmetry_preserving(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_strong_symmetry(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_asi(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_proportionality(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_symmetric_monotonicity(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_c0_symmetric_monotonicity(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_implementation_invariance(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});
AxiomReport check_monomial_distribution(const Method& method, CaseGenerator gen, const CheckOptions& opt = {});

/// Runs one check with a generator seeded from opt.seed and the axiom, on
/// the box [-1, 1]^opt.dim. The report carries opt.seed.
AxiomReport check_axiom(Axiom axiom, const Method& method, const CheckOptions& opt = {});

/// Violation of `axiom` by `method` on a single serialized case, such as a
/// report witness. Raises the method's own errors.
double case_violation(Axiom axiom, const Method& method, const Json& case_json);
double replay(const AxiomReport& report, const Method& method);

/// Built-in methods: ig, shapley, power-path, lshape-xy, lshape-yx,
/// paired-lshape, and the deliberate violators half-ig, ig-squared,
/// uniform-split, negated-ig, layer-count. Raises InvalidConfig.
Method method_by_name(std::string_view name, const QuadratureConfig& q = {});
const std::vector<std::string>& method_names();

/// L-shaped paths on the two designated endpoint pairs ((2, 1), (1, 0)) with
/// the xy corner and ((1, 2), (0, 1)) with the yx corner; ig elsewhere.
Attribution paired_lshape(const Model& f, VecView x_bar, VecView x_prime, const QuadratureConfig& q = {});

}  // namespace axiograd
