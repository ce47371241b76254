#pragma once

// xoshiro256** 1.0 (Blackman & Vigna), seeded by expanding a 64-bit seed
// with splitmix64. Every random quantity in the project flows from this
// generator, so runs are reproducible across platforms and compilers;
// standard-library distributions are deliberately not used.

#include <array>
#include <cstdint>

#include "mfe/field.hpp"

namespace mfe {

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;
  static constexpr const char* kName = "xoshiro256**-1.0/splitmix64";

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  // 53-bit uniform in [0, 1).
  double uniform();
  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::array<std::uint64_t, 4> s_;
};

// sum over modes 0 < max(|m1|,|m2|) <= max_mode of c cos(k.x) + s sin(k.x),
// coefficients uniform in [-amplitude, amplitude] / (1 + |m|^2). Mean-zero
// up to rounding; max_mode must stay below N/2.
Field random_band_limited(const TorusGrid& grid, Xoshiro256& rng, int max_mode, double amplitude = 1.0);

}  // namespace mfe
