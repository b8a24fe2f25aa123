#pragma once

#include <cmath>
#include <cstdint>

namespace sqreg {

// SplitMix64 stream with a Box-Muller normal layer on top.
// Every draw is a pure function of the 64-bit seed, so trials seeded with
// base+index give reproducible, scheduling-independent streams. The standard
// library distributions are implementation-defined and would break the
// bitwise-reproducibility guarantees of the experiment driver.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t x = (state_ += 0x9E3779B97F4A7C15ULL);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // uniform on [0,1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0,1]; safe as a log() argument
  double next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Box-Muller; the second deviate of each pair is cached so the stream is a
  // fixed sequence regardless of call sites.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1 = next_unit_open();
    double u2 = next_unit();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = two_pi * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sqreg
