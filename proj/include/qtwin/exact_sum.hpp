#pragma once

#include <cmath>
#include <vector>

namespace qtwin {

/// Error-free transformations. Valid while no intermediate overflows or
/// underflows into the subnormal range.
struct TwoTerm {
  double hi;
  double lo;
};

inline TwoTerm two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline TwoTerm fast_two_sum(double a, double b) noexcept {
  // requires |a| >= |b| or a == 0
  const double s = a + b;
  return {s, b - (s - a)};
}

inline TwoTerm two_prod(double a, double b) noexcept {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

/// Exact accumulator for sums of doubles and of products of two or three
/// doubles. The running value is kept as a nonoverlapping expansion (a list
/// of doubles ordered by increasing magnitude whose exact sum is the value),
/// so the result depends only on the real value of the sum, not on the order
/// or grouping of the terms.
class ExactSum {
 public:
  void add(double x);
  void add_product(double a, double b);
  void add_product(double a, double b, double c);

  /// Value rounded to nearest, ties to even.
  double value() const;
  /// Value as an unevaluated pair hi + lo with hi = value().
  TwoTerm value_pair() const;
  /// -1, 0 or +1.
  int sign() const;

  const std::vector<double>& components() const noexcept { return terms_; }

 private:
  void compress();

  std::vector<double> terms_;
};

}  // namespace qtwin
