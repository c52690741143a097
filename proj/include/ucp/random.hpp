#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ucp {

/// mt19937_64 with explicitly specified variate transforms, so a seed gives
/// the same stream on every standard library:
///   uniform01: top 53 bits of one draw, scaled by 2^-53, in [0, 1)
///   normal:    Box-Muller on two uniform01 draws, both outputs used in order
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal(double mean, double stddev) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mean + stddev * radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ucp
