#pragma once

#include <cmath>

#include "qtwin/exact_sum.hpp"

namespace qtwin {

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2 (about 106 bits).
/// Only the operations the phase arithmetic needs are provided.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double x) : hi(x), lo(0.0) {}  // NOLINT(implicit)
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  double to_double() const noexcept { return hi + lo; }
};

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) noexcept {
  TwoTerm s = two_sum(a.hi, b.hi);
  const TwoTerm t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = fast_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  s = fast_two_sum(s.hi, s.lo);
  return {s.hi, s.lo};
}

inline DoubleDouble operator-(DoubleDouble a) noexcept { return {-a.hi, -a.lo}; }

inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) noexcept {
  return a + (-b);
}

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) noexcept {
  TwoTerm p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  p = fast_two_sum(p.hi, p.lo);
  return {p.hi, p.lo};
}

inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) noexcept {
  const double q1 = a.hi / b.hi;
  DoubleDouble r = a - b * DoubleDouble(q1);
  const double q2 = r.hi / b.hi;
  r = r - b * DoubleDouble(q2);
  const double q3 = r.hi / b.hi;
  const TwoTerm q = fast_two_sum(q1, q2);
  return DoubleDouble(q.hi, q.lo) + DoubleDouble(q3);
}

/// 2π to double-double precision.
inline constexpr DoubleDouble kTwoPi{6.283185307179586232e+00,
                                     2.449293598294706414e-16};

/// Reduces an angle to [−π, π] (ε-accurate for |x| well below 2^53·2π).
inline DoubleDouble reduce_angle(DoubleDouble x) noexcept {
  const double turns = std::nearbyint(x.hi / kTwoPi.hi);
  return x - kTwoPi * DoubleDouble(turns);
}

/// cos of a double-double angle, accurate to about one ulp of the result
/// after reduction.
inline double cos_dd(DoubleDouble x) noexcept {
  const DoubleDouble r = reduce_angle(x);
  return std::cos(r.hi) - std::sin(r.hi) * r.lo;
}

}  // namespace qtwin
