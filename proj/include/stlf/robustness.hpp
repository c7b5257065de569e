#pragma once

#include <algorithm>
#include <compare>
#include <string>

namespace stlf {

/// Quantitative satisfaction degree: a real part plus an integer
/// coefficient of the infinitesimal epsilon. Ordering is lexicographic,
/// so (0,+1) > (0,0) > (0,-1) and epsilon never outweighs a real margin.
struct Robustness {
  double value = 0.0;  ///< real part
  int eps = 0;         ///< epsilon coefficient, stays in {-1, 0, +1}

  friend bool operator==(const Robustness& a, const Robustness& b) {
    return a.value == b.value && a.eps == b.eps;
  }
  friend bool operator<(const Robustness& a, const Robustness& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.eps < b.eps;
  }
  friend bool operator>(const Robustness& a, const Robustness& b) { return b < a; }
  friend bool operator<=(const Robustness& a, const Robustness& b) { return !(b < a); }
  friend bool operator>=(const Robustness& a, const Robustness& b) { return !(a < b); }

  Robustness operator-() const { return {-value, -eps}; }

  /// Nonnegative robustness means the formula holds.
  bool satisfied() const { return !(*this < Robustness{0.0, 0}); }

  static Robustness eps_pos() { return {0.0, +1}; }
  static Robustness eps_neg() { return {0.0, -1}; }
  static Robustness zero() { return {0.0, 0}; }
  static Robustness exact(double v) { return {v, 0}; }
};

inline Robustness min(const Robustness& a, const Robustness& b) { return a < b ? a : b; }
inline Robustness max(const Robustness& a, const Robustness& b) { return a < b ? b : a; }

inline std::string to_string(const Robustness& r) {
  std::string s = std::to_string(r.value);
  if (r.eps > 0) s += "+eps";
  if (r.eps < 0) s += "-eps";
  return s;
}

}  // namespace stlf
