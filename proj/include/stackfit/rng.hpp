#pragma once

#include <cstdint>

namespace stackfit {

/// splitmix64 finalizer; used for seeding and for deriving sub-streams.
std::uint64_t splitmix64(std::uint64_t x);

/// xorshift64* (Vigna): state ^= state >> 12; state ^= state << 25;
/// state ^= state >> 27; output = state * 0x2545F4914F6CDD1D.
/// The seed is passed through splitmix64 so that seed 0 is usable.
/// Fixed here instead of <random> so fixtures are reproducible bit-for-bit
/// by any reimplementation.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);

  std::uint64_t next();
  /// Top 53 bits scaled into [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Box-Muller using two uniforms per call (no cached spare).
  double normal();

 private:
  std::uint64_t state_;
};

/// Stream seed for a (base seed, key) pair, e.g. one bench row per noise count.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key);

}  // namespace stackfit
