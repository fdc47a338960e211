#pragma once

#include <cstdint>

namespace qfilter {

/// SplitMix64 generator. Streams are derived by hashing a key into the
/// starting state, so any (seed, a, b) triple names an independent sequence.
class SplitMix64 {
 public:
  using result_type = uint64_t;

  explicit SplitMix64(uint64_t state) : state_(state) {}

  static constexpr uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 stream(uint64_t seed, uint64_t a, uint64_t b) {
    return SplitMix64(mix(mix(seed ^ mix(a + kGamma)) + b * kGamma));
  }

  uint64_t operator()() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return UINT64_MAX; }

 private:
  static constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  uint64_t state_;
};

}  // namespace qfilter
