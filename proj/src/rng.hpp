#pragma once

#include <cstdint>
#include <string_view>

namespace fpsynth {

// Deterministic random source used everywhere randomness is needed.
//
// std::normal_distribution and friends are implementation-defined, which would
// break the bit-reproducibility contract across toolchains, so the generator
// (xoshiro256++), the seeding (splitmix64) and the distributions (Box-Muller)
// are all pinned here.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();

  // Uniform integer in [lo, hi] inclusive, by rejection (unbiased).
  int64_t uniform_int(int64_t lo, int64_t hi);

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();

  // Stable stream derivation: mixes (seed, tag, index) into a fresh seed so
  // that parallel consumers get independent, order-free streams.
  static uint64_t derive(uint64_t seed, std::string_view tag, uint64_t index = 0);
  static uint64_t mix(uint64_t a, uint64_t b);

 private:
  uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace fpsynth
