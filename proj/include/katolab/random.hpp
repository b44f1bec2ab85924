#pragma once

#include <cstdint>

namespace katolab {

/// SplitMix64. The k-th output (k = 0, 1, ...) of a stream seeded with `s` is
/// mix(s + (k + 1) * 0x9E3779B97F4A7C15) where mix is the standard SplitMix64
/// finalizer, so any draw can be recomputed from (seed, counter) alone.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Independent sub-stream seed: stream 0 is the seed itself.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return stream == 0 ? seed : SplitMix64::mix(seed ^ (stream * SplitMix64::kGolden));
}

}  // namespace katolab
