#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace apx {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(Integer num, Integer den) {
  return Rational(std::move(num), std::move(den));
}

inline Integer rational_floor(const Rational& r) {
  Integer q = numerator(r) / denominator(r);
  if (r < 0 && q * denominator(r) != numerator(r)) --q;
  return q;
}

inline Integer rational_ceil(const Rational& r) { return -rational_floor(-r); }

inline Integer ipow(Integer base, unsigned long e) {
  Integer r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline Rational rpow(const Rational& base, unsigned long e) {
  return Rational(ipow(numerator(base), e), ipow(denominator(base), e));
}

// Positive modulus representative in [0, m).
inline std::int64_t mod_pos(std::int64_t v, std::int64_t m) {
  std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

}  // namespace apx
