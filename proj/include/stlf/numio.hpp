#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <system_error>

#include "stlf/errors.hpp"

namespace stlf {

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text) {
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
  double out = 0;
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc() || res.ptr != e)
    raise(Errc::parse_error, "not a number: '" + text + "'");
  return out;
}

/// Exact decimal expansion of a finite double (doubles are dyadic
/// rationals, so the expansion is finite). Used where the textual value
/// must mean exactly the stored bits, e.g. SMT-LIB literals.
inline std::string exact_decimal(double v) {
  if (!std::isfinite(v)) raise(Errc::domain_error, "non-finite value");
  double a = std::fabs(v);
  char buf[1152];
  std::snprintf(buf, sizeof(buf), "%.1074f", a);
  std::string s(buf);
  auto dot = s.find('.');
  auto last = s.find_last_not_of('0');
  if (last == dot) last = dot + 1;  // keep one digit after the point
  s.erase(last + 1);
  if (std::signbit(v) && a != 0.0) s.insert(s.begin(), '-');
  return s;
}

}  // namespace stlf
