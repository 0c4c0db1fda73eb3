#ifndef ASCTK_RNG_HPP
#define ASCTK_RNG_HPP

#include <cstdint>
#include <random>

namespace asctk {

// Seeded generator with an explicit double mapping. std::mt19937_64 output is
// specified by the standard, and the mappings below avoid the
// implementation-defined std distributions, so streams are reproducible
// across platforms and compilers.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double uniform_open0() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Rejection-free modulo is fine at our scales;
  /// bias is < n / 2^64.
  std::uint64_t uniform_index(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

  std::uint64_t raw() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a salt
/// (SplitMix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace asctk

#endif
