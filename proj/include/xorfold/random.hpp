#ifndef XORFOLD_RANDOM_HPP
#define XORFOLD_RANDOM_HPP

// Portable random streams and seed derivation.
//
// The standard <random> distributions are implementation defined, so every
// draw that affects an output file goes through the helpers below. The engine
// itself (mt19937_64) is fully specified by the standard.

#include <cstdint>
#include <random>

namespace xorfold {

/// SplitMix64 finalizer. Used both as a hash and to expand seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stable 64-bit seed for stream `(base, a, b)`.
///
/// seed = splitmix64(splitmix64(splitmix64(base) ^ a) ^ b). External tools
/// regenerate instance `index` at size `n` of an experiment with base seed `s`
/// by calling derive_seed(s, n, index).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform n-bit string.
  std::uint64_t bits(int n) {
    const std::uint64_t x = engine_();
    return n >= 64 ? x : (x & ((std::uint64_t{1} << n) - 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace xorfold

#endif  // XORFOLD_RANDOM_HPP
