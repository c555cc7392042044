#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace regmetrics {

// Seedable generator with a fully specified output sequence.
//
// The engine is std::mt19937_64, whose output is fixed by the C++ standard.
// The standard distributions are implementation-defined, so every derived
// draw is computed here explicitly:
//   uniform_index: rejection sampling on the top of the 64-bit range
//   uniform01:     53 high bits scaled by 2^-53, in [0, 1)
//   normal:        Box-Muller, both outputs used in order
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  double uniform01();

  // Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal deviate.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace regmetrics
