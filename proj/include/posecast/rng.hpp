#pragma once

#include <cmath>
#include <cstdint>

namespace posecast {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen because the integer stream is
// fully specified by the mix function below, so generated datasets are
// reproducible across toolchains, and because output i can be computed
// directly from the seed, which lets field noise be evaluated per cell
// without carrying sequential state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // i-th output of the stream started at `seed`, 0-based.
  static std::uint64_t at(std::uint64_t seed, std::uint64_t i) {
    return mix(seed + (i + 1) * kGamma);
  }

  // Uniform double in (0, 1); never returns an exact 0 or 1.
  double next_double() { return to_unit(next_u64()); }

  // Uniform in [lo, hi).
  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller; consumes two outputs.
  double next_normal() {
    const double u1 = next_double();
    const double u2 = next_double();
    return box_muller(u1, u2);
  }

  static double to_unit(std::uint64_t x) {
    // 53 mantissa bits, offset by half an ulp so the result is never 0.
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
  }

  static double box_muller(double u1, double u2) {
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  std::uint64_t state_;
};

}  // namespace posecast
