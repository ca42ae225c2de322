#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qtwin/clock_interference.hpp"
#include "qtwin/errors.hpp"
#include "qtwin/geometry.hpp"
#include "qtwin/phase_engine.hpp"
#include "support.hpp"

namespace qtwin {
namespace {

using testing::rel_diff;

constexpr double kSrOmega = kStrontiumClockOmega;
const double kKm = kMagicWaveNumber;

TEST(PerState, DegenerateClockGivesIdenticalStates) {
  const ClockPair clock(kStrontium87Mass, 0.0);
  const PulseSequence s = build_rbi_double_loop(1e9, 0.1);
  const PhaseBreakdown a = per_state_phase(s, clock, ClockState::a, {9.81}, {});
  const PhaseBreakdown b = per_state_phase(s, clock, ClockState::b, {9.81}, {});
  EXPECT_EQ(a.total_phase, b.total_phase);
  EXPECT_EQ(a.delta_tau, b.delta_tau);
}

TEST(PerState, DoubleLoopPhaseRatioIsInverseMassRatio) {
  const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, 0.2);
  const PulseSequence s = build_rbi_double_loop(1e9, 0.1);
  const double pa = per_state_phase(s, clock, ClockState::a, {9.81}, {}).total_phase;
  const double pb = per_state_phase(s, clock, ClockState::b, {9.81}, {}).total_phase;
  EXPECT_LE(rel_diff(pa / pb, clock.mass_b() / clock.mass_a()), 1e-14);
}

TEST(PerState, MziStatesDegenerate) {
  const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, 0.2);
  const double k = 1e7, T = 0.1, g = 9.81;
  const PulseSequence s = build_mzi(k, T);
  for (const ClockState st : {ClockState::a, ClockState::b}) {
    EXPECT_LE(rel_diff(per_state_phase(s, clock, st, {g}, {}).total_phase, -k * g * T * T),
              1e-15);
  }
}

TEST(Fringe, Values) {
  EXPECT_EQ(fringe(0.0), 1.0);
  EXPECT_NEAR(fringe(std::numbers::pi), 0.0, 1e-16);
  // k g T² = π/2
  const double T = 0.1, g = 9.81;
  const double k = std::numbers::pi / 2 / (g * T * T);
  EXPECT_NEAR(fringe(build_mzi(k, T), Species(kStrontium87Mass), {g}, {}), 0.5, 1e-12);
}

TEST(Beat, MziWithoutGravityIsFullyConstructive) {
  const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, 0.2);
  const BeatSignal b = beat(build_mzi(1e7, 0.1), clock, {0.0}, {});
  EXPECT_EQ(b.p_combined, 1.0);
  EXPECT_EQ(b.envelope, 1.0);
  EXPECT_EQ(b.p_closed_form, 1.0);
}

TEST(Beat, EtaForTwentyPercent) {
  const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, 0.2);
  EXPECT_NEAR(clock.eta(), 1.0101010101010102, 1e-15);
}

TEST(Beat, VisibilityVanishesAtPi) {
  // choose T on the double loop so that ηΩ|Δτ| = π
  const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, 0.1);
  const double k = 1e7;
  const double unit = std::abs(proper_time_difference(build_rbi_double_loop(k, 1.0),
                                                      Species(kStrontium87Mass)));
  const double T = std::numbers::pi / (clock.eta() * clock.splitting_omega() * unit);
  const BeatSignal b = beat(build_rbi_double_loop(k, T), clock, {9.81}, {});
  EXPECT_NEAR(b.envelope, 0.0, 1e-9);
  EXPECT_NEAR(b.p_combined, 0.5, 1e-9);
}

TEST(Beat, ProductFormMatchesStateAverage) {
  std::mt19937_64 rng(201);
  std::uniform_real_distribution<double> ratio(0.0, 0.3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const PulseSequence s = testing::random_closed_geometry(rng, {}, true);
    const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, ratio(rng));
    const BeatSignal b = beat(s, clock, {9.81 + u(rng)}, {u(rng), u(rng)});
    ASSERT_LE(std::abs(b.p_combined - b.p_closed_form), kBeatConsistencyTol);
    for (const double p : {b.p_a, b.p_b, b.p_combined, b.p_closed_form}) {
      ASSERT_GE(p, 0.0);
      ASSERT_LE(p, 1.0);
    }
    ASSERT_LE(std::abs(b.envelope), 1.0);
  }
}

TEST(Beat, HalfSumAndHalfDifferenceOfStatePhases) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> ratio(0.01, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const PulseSequence s = testing::random_closed_geometry(rng);
    const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, ratio(rng));
    const GravityEnv env{9.81};
    const double pa = per_state_phase(s, clock, ClockState::a, env, {}).total_phase;
    const double pb = per_state_phase(s, clock, ClockState::b, env, {}).total_phase;
    const PhaseBreakdown mean = total_phase(s, Species(clock.mean_mass()), env, {});
    const double eta = clock.eta();
    const double half_diff = -eta * clock.splitting_omega() * mean.delta_tau / 2;
    const double half_sum = eta * mean.recoil_phase + mean.gravito_recoil + mean.laser_phase;
    const double scale = std::abs(pa) + std::abs(pb);
    EXPECT_NEAR((pa - pb) / 2, half_diff, 1e-13 * scale);
    EXPECT_NEAR((pa + pb) / 2, half_sum, 1e-13 * scale);
  }
}

TEST(Beat, EnvelopeEvenInSplitting) {
  // swapping the state labels (Δm → −Δm) leaves the signal unchanged:
  // P is symmetric in (p_a, p_b)
  const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, 0.2);
  const PulseSequence s = build_rbi_asymmetric(1e7, 0.1, 0.02);
  const BeatSignal b = beat(s, clock, {9.81}, {});
  EXPECT_EQ(b.p_combined, 0.5 * (b.p_b + b.p_a));
  EXPECT_EQ(std::cos(-std::acos(b.envelope)), b.envelope);
}

TEST(Beat, StrontiumFeasibilityPoint) {
  const ClockPair clock(kStrontium87Mass, kSrOmega);
  const BeatSignal b = beat(build_rbi_double_loop(1200 * kKm, 0.325), clock, {9.81}, {});
  const double x = clock.eta() * kSrOmega * std::abs(b.delta_tau);
  EXPECT_NEAR(x / std::numbers::pi, 1.0741, 1e-3);
}

TEST(ClockLimit, DegenerateClockHasNoCorrection) {
  const ClockPair clock(kStrontium87Mass, 0.0);
  const ClockLimitPhase c = clock_limit_phase(build_rbi_double_loop(1e9, 0.1), clock, {}, {});
  EXPECT_EQ(c.phase_full, c.phase_eta1);
  EXPECT_EQ(c.carrier_full, c.carrier_eta1);
}

TEST(ClockLimit, RelativeCorrectionIsEtaMinusOne) {
  const PulseSequence s = build_rbi_double_loop(1e9, 0.1);
  double last = 0.0;
  for (const double r : {0.2, 0.1, 0.05}) {
    const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, r);
    const ClockLimitPhase c = clock_limit_phase(s, clock, {}, {});
    const double eta_minus_1 = (r / 2) * (r / 2) / (1 - (r / 2) * (r / 2));
    EXPECT_NEAR(std::abs(c.phase_full - c.phase_eta1) / std::abs(c.phase_eta1), eta_minus_1,
                1e-12);
    EXPECT_NEAR(std::abs(c.carrier_full - c.carrier_eta1) / std::abs(c.carrier_eta1),
                eta_minus_1, 1e-12);
    if (last > 0.0) {
      EXPECT_NEAR(last / eta_minus_1, 4.0, 0.05);  // quadratic shrinkage
    }
    last = eta_minus_1;
  }
}

TEST(VisibilityScan, SmallArgumentExpansion) {
  const ClockPair clock(kStrontium87Mass, kSrOmega);
  const auto family = [](double T) { return build_rbi_double_loop(100 * kMagicWaveNumber, T); };
  const auto rows = visibility_scan(family, {0.0, 0.01, 0.02, 0.05}, clock, {9.81});
  EXPECT_EQ(rows[0].envelope, 1.0);
  EXPECT_EQ(rows[0].delta_tau, 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double x = clock.eta() * kSrOmega * rows[i].delta_tau;
    EXPECT_NEAR(1 - rows[i].envelope, x * x / 8, 1e-3 * x * x / 8);
    EXPECT_LT(std::abs(rows[i].envelope), std::abs(rows[i - 1].envelope));
  }
}

TEST(VisibilityScan, TenPercentReductionPoint) {
  const ClockPair clock(kStrontium87Mass, kSrOmega);
  const auto family = [](double T) { return build_rbi_double_loop(580 * kMagicWaveNumber, T); };
  const auto rows = visibility_scan(family, {0.35}, clock, {9.81});
  EXPECT_NEAR(1 - rows[0].envelope, 0.0887, 5e-4);
}

TEST(EnvelopeZero, BisectionFindsPiCondition) {
  const ClockPair clock = ClockPair::from_mass_ratio(kStrontium87Mass, 0.2);
  const double k = 1e7;
  const auto family = [k](double T) { return build_rbi_double_loop(k, T); };
  const double unit = std::abs(proper_time_difference(family(1.0), Species(kStrontium87Mass)));
  const double guess = std::numbers::pi / (clock.eta() * clock.splitting_omega() * unit);
  const EnvelopeZero z = locate_envelope_zero(family, clock, 0.5 * guess, 1.5 * guess);
  const double target = std::numbers::pi / (clock.eta() * clock.splitting_omega());
  EXPECT_LE(rel_diff(std::abs(z.delta_tau), target), 1e-9);
  EXPECT_THROW(locate_envelope_zero(family, clock, 0.1 * guess, 0.2 * guess), InvalidArgument);
}

}  // namespace
}  // namespace qtwin
