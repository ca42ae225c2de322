#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qtwin/double_double.hpp"
#include "qtwin/exact_sum.hpp"
#include "support.hpp"

namespace qtwin {
namespace {

using testing::Quad;

TEST(ExactSum, EmptyIsZero) {
  ExactSum s;
  EXPECT_EQ(s.value(), 0.0);
  EXPECT_EQ(s.sign(), 0);
}

TEST(ExactSum, CancelsCatastrophicTerms) {
  ExactSum s;
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  EXPECT_EQ(s.value(), 1.0);
}

TEST(ExactSum, ProductIsExact) {
  const double a = 1.0 + std::ldexp(1.0, -30);
  ExactSum s;
  s.add_product(a, a);
  s.add(-1.0);
  s.add(-std::ldexp(1.0, -29));
  EXPECT_EQ(s.value(), std::ldexp(1.0, -60));
}

TEST(ExactSum, RoundsTiesToEven) {
  // 1 + 2^-53 lies halfway between 1 and its successor
  ExactSum s;
  s.add(1.0);
  s.add(std::ldexp(1.0, -53));
  EXPECT_EQ(s.value(), 1.0);
  ExactSum t;
  t.add(1.0 + std::ldexp(1.0, -52));
  t.add(std::ldexp(1.0, -53));
  EXPECT_EQ(t.value(), 1.0 + std::ldexp(1.0, -51));
}

TEST(ExactSum, RoundingIsCorrectJustAboveTie) {
  ExactSum s;
  s.add(1.0);
  s.add(std::ldexp(1.0, -53));
  s.add(std::ldexp(1.0, -300));
  EXPECT_EQ(s.value(), std::nextafter(1.0, 2.0));
}

TEST(ExactSum, OrderIndependentOnRandomTerms) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-40, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> terms(60);
    for (double& x : terms) x = std::ldexp(mant(rng), expo(rng));
    ExactSum forward;
    for (double x : terms) forward.add(x);
    std::shuffle(terms.begin(), terms.end(), rng);
    ExactSum shuffled;
    for (double x : terms) shuffled.add(x);
    ASSERT_EQ(forward.value(), shuffled.value());
    Quad ref = 0;
    for (double x : terms) ref += x;
    // binary128 has 113 bits; with exponents within ±40 its sum is exact
    ASSERT_EQ(forward.value(), static_cast<double>(ref));
  }
}

TEST(ExactSum, SignOfTinyResidual) {
  ExactSum s;
  s.add(0.1);
  s.add(0.2);
  s.add(-0.3);
  EXPECT_EQ(s.sign(), 1);  // the doubles 0.1 + 0.2 exceed the double 0.3
  EXPECT_GT(s.value(), 0.0);
}

TEST(DoubleDouble, ReducesLargeAnglesAccurately) {
  // 1e11 rad reduced with a double-double 2π matches binary128 reduction
  const double x = 1.53893737590712e11;
  const double r = reduce_angle(DoubleDouble(x)).to_double();
  const Quad two_pi_q = Quad(kTwoPi.hi) + Quad(kTwoPi.lo);
  Quad turns = Quad(std::nearbyint(x / kTwoPi.hi));
  const double ref = static_cast<double>(Quad(x) - turns * two_pi_q);
  EXPECT_NEAR(r, ref, 1e-15);
  EXPECT_LE(std::abs(r), 3.1416);
}

TEST(DoubleDouble, DivisionRoundTrips) {
  const DoubleDouble a(1.0);
  const DoubleDouble b(3.0);
  const DoubleDouble q = a / b;
  const DoubleDouble back = q * b;
  EXPECT_NEAR(back.hi - 1.0 + back.lo, 0.0, 1e-31);
}

}  // namespace
}  // namespace qtwin
