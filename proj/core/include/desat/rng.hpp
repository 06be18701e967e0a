#pragma once

#include <cstdint>

namespace desat {

// SplitMix64 step: advances the state and returns the next output word.
std::uint64_t split_mix64(std::uint64_t& state);

// One-shot mix of a value through a single SplitMix64 step.
std::uint64_t mix64(std::uint64_t value);

// Seed for trial `trial` of sweep point `point`:
//   mix(mix(mix(base) ^ point) ^ trial)
// Serial and parallel runs draw from the same per-trial streams, so
// aggregation order is the only thing schedulers can change.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point, std::uint64_t trial);

// Deterministic generator used everywhere randomness is needed. Avoids
// std::normal_distribution so byte-for-byte reproducibility does not hinge on
// one standard library's algorithm choice.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return split_mix64(state_); }

  // Uniform on (0, 1]; never returns 0 so it is safe under log().
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; pairs are cached.
  double normal();

  // Uniform bit.
  int bit() { return static_cast<int>(next_u64() >> 63); }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace desat
