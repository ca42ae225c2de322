#include "qtwin/exact_sum.hpp"

#include <cstddef>
#include <limits>

namespace qtwin {

namespace {

// Adds b to the nonoverlapping expansion e (increasing magnitude), dropping
// zero components.
void grow(std::vector<double>& e, double b) {
  if (b == 0.0) return;
  std::size_t out = 0;
  double q = b;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const TwoTerm s = two_sum(q, e[i]);
    q = s.hi;
    if (s.lo != 0.0) e[out++] = s.lo;
  }
  e.resize(out);
  if (q != 0.0) e.push_back(q);
}

int expansion_sign(const std::vector<double>& e) {
  // The largest component of a nonoverlapping expansion carries its sign.
  if (e.empty()) return 0;
  return e.back() > 0.0 ? 1 : -1;
}

}  // namespace

void ExactSum::add(double x) {
  grow(terms_, x);
  if (terms_.size() > 32) compress();
}

void ExactSum::add_product(double a, double b) {
  const TwoTerm p = two_prod(a, b);
  add(p.lo);
  add(p.hi);
}

void ExactSum::add_product(double a, double b, double c) {
  const TwoTerm p = two_prod(a, b);
  const TwoTerm hi = two_prod(p.hi, c);
  const TwoTerm lo = two_prod(p.lo, c);
  add(lo.lo);
  add(lo.hi);
  add(hi.lo);
  add(hi.hi);
}

// Shewchuk's COMPRESS: renormalises so the expansion stays short.
void ExactSum::compress() {
  if (terms_.size() < 2) return;
  const std::size_t m = terms_.size();
  std::vector<double> g(m);
  std::size_t bottom = m - 1;
  double q = terms_[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    const TwoTerm s = fast_two_sum(q, terms_[i]);
    if (s.lo != 0.0) {
      g[bottom--] = s.hi;
      q = s.lo;
    } else {
      q = s.hi;
    }
  }
  g[bottom] = q;
  std::vector<double> h;
  h.reserve(m);
  for (std::size_t i = bottom + 1; i < m; ++i) {
    const TwoTerm s = fast_two_sum(g[i], q);
    q = s.hi;
    if (s.lo != 0.0) h.push_back(s.lo);
  }
  if (q != 0.0) h.push_back(q);
  terms_ = std::move(h);
}

int ExactSum::sign() const { return expansion_sign(terms_); }

double ExactSum::value() const {
  if (terms_.empty()) return 0.0;
  double approx = 0.0;
  for (double t : terms_) approx += t;

  // Walk to the correctly rounded neighbour: compare the exact residual
  // against half the gap to the adjacent double.
  for (;;) {
    std::vector<double> r = terms_;
    grow(r, -approx);
    const int s = expansion_sign(r);
    if (s == 0) return approx;
    const double next = std::nextafter(
        approx, s > 0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity());
    const double half_gap = 0.5 * (next - approx);
    grow(r, -half_gap);
    const int d = expansion_sign(r) * s;
    if (d > 0) {
      approx = next;
      continue;
    }
    if (d < 0) return approx;
    // tie: keep the neighbour with an even last mantissa bit
    int exp = 0;
    const double mantissa = std::ldexp(std::frexp(approx, &exp), 53);
    return std::fmod(mantissa, 2.0) == 0.0 ? approx : next;
  }
}

TwoTerm ExactSum::value_pair() const {
  const double hi = value();
  ExactSum rest = *this;
  rest.add(-hi);
  return {hi, rest.value()};
}

}  // namespace qtwin
