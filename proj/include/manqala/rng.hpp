#pragma once

#include <cstdint>
#include <random>

namespace manqala {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of trajectory `index` under `master_seed`. Depends only on the pair,
/// so any worker may run any trajectory.
constexpr std::uint64_t trajectory_seed(std::uint64_t master_seed,
                                        std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index + 1));
}

/// Per-trajectory generator. mt19937_64 output is fixed by the standard;
/// uniform() uses the top 53 bits directly rather than a library
/// distribution, whose algorithm is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace manqala
