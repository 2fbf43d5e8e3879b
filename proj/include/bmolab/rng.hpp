#pragma once

// Seeded RNG with portable value extraction. mt19937_64 is fully specified
// by the standard; doubles are derived from raw bits rather than through
// std::uniform_real_distribution, whose output is implementation-defined.

#include <complex>
#include <cstdint>
#include <random>

namespace bmolab {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling keeps the draw unbiased and portable.
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  std::int64_t range(std::int64_t lo, std::int64_t hi_inclusive) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi_inclusive - lo + 1)));
  }

  bool chance(double p) { return uniform01() < p; }

  std::complex<double> complex_in_square(double half_side) {
    const double re = uniform(-half_side, half_side);
    const double im = uniform(-half_side, half_side);
    return {re, im};
  }

  std::uint64_t raw() { return eng_(); }

private:
  std::mt19937_64 eng_;
};

} // namespace bmolab
