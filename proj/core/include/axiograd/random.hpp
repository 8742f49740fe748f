#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace axiograd {

/// mt19937_64 with uniforms built from raw bits, so sequences do not depend
/// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., n - 1}; modulo bias is below 2^-50 for n < 2^14.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(bits() % n); }
  bool coin(double p = 0.5) { return uniform() < p; }
  double sign() { return coin() ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with a stream label (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace axiograd
