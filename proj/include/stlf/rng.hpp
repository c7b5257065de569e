#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stlf {

/// Seeded random source with samplers fixed in this library (not
/// delegated to implementation-defined std distributions), so recorded
/// witnesses reproduce across platforms and standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  long uniform_index(long n) {
    long i = static_cast<long>(uniform01() * static_cast<double>(n));
    return i >= n ? n - 1 : i;
  }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double normal() {
    double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  }

private:
  std::mt19937_64 gen_;  // sequence fixed by the standard
};

}  // namespace stlf
