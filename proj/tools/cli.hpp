#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <axiograd/quadrature.hpp>
#include <axiograd/types.hpp>

namespace axiograd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitUndefined = 2;
inline constexpr int kExitAxiomFail = 3;

enum class Command { kAttribute, kAxioms, kConverge };
enum class Format { kJson, kCsv };

struct RunConfig {
  Command command = Command::kAttribute;
  std::string model;
  Vec input;
  Vec baseline;
  std::string method = "ig";
  QuadratureConfig quadrature;
  std::uint64_t seed = 42;
  std::string output;  // empty: standard output
  Format format = Format::kJson;

  // axioms
  std::vector<std::string> axioms;
  bool all = false;
  std::size_t cases = 200;
  std::size_t dim = 3;
  double tol = 1e-6;
  double secant_eps = 1e-3;
  std::size_t secant_grid = 21;
  std::size_t threads = 0;
  std::vector<std::pair<Vec, Vec>> endpoint_pairs;

  // converge
  std::string kind;
  Vec grid;
};

/// "1,-2.5,3" -> {1, -2.5, 3}. Raises InvalidConfig.
Vec parse_vector(std::string_view text);

/// Runs one command line. `env_seed` is the value of AXIOGRAD_SEED, or null.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const char* env_seed);

}  // namespace axiograd::cli
