#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qtwin/errors.hpp"
#include "qtwin/geometry.hpp"
#include "qtwin/kinematics.hpp"
#include "support.hpp"

namespace qtwin {
namespace {

const Species kSr(kStrontium87Mass);
const double kRecoil = kCodata2018.hbar / kStrontium87Mass;

TEST(KickTrajectory, MziUpperBranchVelocities) {
  const double k = 1e7, T = 0.1;
  const PulseSequence s = build_mzi(k, T);
  const BranchTrajectory tr = kick_trajectory(s, Branch::upper, kSr);
  ASSERT_EQ(tr.segments.size(), 3u);
  EXPECT_EQ(tr.segments[0].t_start, 0.0);
  EXPECT_EQ(tr.segments[0].z_start, 0.0);
  EXPECT_EQ(tr.segments[0].velocity, kRecoil * k);
  EXPECT_EQ(tr.segments[1].velocity, 0.0);
  EXPECT_EQ(tr.segments[2].velocity, 0.0);
  EXPECT_NEAR(tr.segments[1].z_start, kRecoil * k * T, 1e-18);
}

TEST(KickTrajectory, EmptyKickListStaysAtRest) {
  PulseSequence s;
  s.t_end = 1.0;
  const BranchTrajectory tr = kick_trajectory(s, Branch::lower, kSr);
  for (const double t : {0.0, 0.5, 1.0}) {
    const KinematicState st = kick_state(s, tr, t);
    EXPECT_EQ(st.z, 0.0);
    EXPECT_EQ(st.v, 0.0);
  }
}

TEST(KickTrajectory, OppositeKicksReturnToRest) {
  PulseSequence s;
  s.pulses = {{0.0, 1e7, 0.0}, {0.2, -1e7, 0.0}};
  s.t_end = 0.5;
  const BranchTrajectory tr = kick_trajectory(s, Branch::upper, kSr);
  EXPECT_EQ(tr.segments.back().velocity, 0.0);
  EXPECT_NEAR(kick_state(s, tr, 0.5).z, kRecoil * 1e7 * 0.2, 1e-18);
}

TEST(KickTrajectory, VelocityJumpsByRecoilAtPulses) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const PulseSequence s = testing::random_closed_geometry(rng);
    for (const Branch b : {Branch::upper, Branch::lower}) {
      const BranchTrajectory tr = kick_trajectory(s, b, kSr);
      double v = 0.0;
      for (std::size_t i = 0; i < tr.segments.size(); ++i) {
        v += kRecoil * s.pulses[i].k(b);
        EXPECT_NEAR(tr.segments[i].velocity, v, 1e-12 * std::abs(kRecoil) * 1e8);
        if (i > 0) {
          // position is continuous across the boundary
          const auto& prev = tr.segments[i - 1];
          const double z_end = prev.z_start + prev.velocity * (prev.t_end - prev.t_start);
          EXPECT_NEAR(tr.segments[i].z_start, z_end, 1e-15);
        }
      }
    }
  }
}

TEST(KickTrajectory, ScalesInverselyWithMass) {
  const PulseSequence s = build_rbi_asymmetric(1e7, 0.1, 0.05);
  const BranchTrajectory a = kick_trajectory(s, Branch::upper, kSr);
  const BranchTrajectory b = kick_trajectory(s, Branch::upper, Species(2.0 * kSr.mass()));
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    EXPECT_NEAR(a.segments[i].velocity, 2.0 * b.segments[i].velocity,
                1e-15 * std::abs(a.segments[i].velocity) + 1e-30);
  }
}

TEST(GravityTrajectory, ClosedFormValues) {
  const KinematicState rest = gravity_trajectory({0.0}, {}, 3.0);
  EXPECT_EQ(rest.z, 0.0);
  EXPECT_EQ(rest.v, 0.0);
  const KinematicState fall = gravity_trajectory({9.81}, {}, 1.0);
  EXPECT_DOUBLE_EQ(fall.z, -4.905);
  EXPECT_DOUBLE_EQ(fall.v, -9.81);
}

TEST(GravityTrajectory, InitialPositionShifts) {
  for (const double t : {0.0, 0.3, 1.7}) {
    const double a = gravity_trajectory({9.81}, {0.0, 2.0}, t).z;
    const double b = gravity_trajectory({9.81}, {0.75, 2.0}, t).z;
    EXPECT_NEAR(b - a, 0.75, 1e-14);
  }
}

TEST(GravityTrajectory, RejectsGradient) {
  try {
    gravity_trajectory({9.81, 3e-6}, {}, 1.0);
    FAIL();
  } catch (const UnsupportedPotential& e) {
    EXPECT_NE(std::string(e.what()).find("closed-form valid only for linear potential"),
              std::string::npos);
  }
}

TEST(Sample, PulseAtZeroNotYetApplied) {
  const PulseSequence s = build_mzi(1e7, 0.1);
  const KinematicState st = sample(s, Branch::upper, kSr, {9.81}, {0.1, 0.2}, 0.0);
  EXPECT_EQ(st.z, 0.1);
  EXPECT_EQ(st.v, 0.2);
}

TEST(Sample, ClosedMziBranchesMeetAtEnd) {
  const PulseSequence s = build_mzi(1e7, 0.1);
  const KinematicState a = sample(s, Branch::upper, kSr, {9.81}, {}, 0.2);
  const KinematicState b = sample(s, Branch::lower, kSr, {9.81}, {}, 0.2);
  EXPECT_NEAR(a.z, b.z, 1e-15);
  EXPECT_NEAR(a.v, b.v, 1e-15);
}

TEST(Sample, OutOfRangeRejected) {
  const PulseSequence s = build_mzi(1e7, 0.1);
  EXPECT_THROW(sample(s, Branch::upper, kSr, {9.81}, {}, -0.01), InvalidArgument);
  EXPECT_THROW(sample(s, Branch::upper, kSr, {9.81}, {}, 0.21), InvalidArgument);
}

TEST(Sample, BranchDifferenceIndependentOfGravityAndInitialState) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const PulseSequence s = testing::random_closed_geometry(rng);
    const double t = s.t_end * std::abs(u(rng)) / 5.0;
    const auto diff = [&](GravityEnv env, InitialConditions ics) {
      return sample(s, Branch::upper, kSr, env, ics, t).z -
             sample(s, Branch::lower, kSr, env, ics, t).z;
    };
    const double ref = diff({0.0}, {});
    EXPECT_NEAR(diff({9.81 + u(rng)}, {u(rng), u(rng)}), ref, 1e-13);
  }
}

TEST(Sample, ClosedSequencesMeetAtEnd) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const PulseSequence s = testing::random_closed_geometry(rng);
    const KinematicState a = sample(s, Branch::upper, kSr, {9.81}, {}, s.t_end);
    const KinematicState b = sample(s, Branch::lower, kSr, {9.81}, {}, s.t_end);
    EXPECT_NEAR(a.v - b.v, 0.0, 1e-12 * kRecoil * 2e7);
    EXPECT_NEAR(a.z - b.z, 0.0, 1e-12 * kRecoil * 2e7 * s.t_end + 1e-15);
  }
}

TEST(TrajectoryCsv, HeaderAndEndpoints) {
  const PulseSequence s = build_mzi(1e7, 0.1);
  const std::string csv = trajectory_csv(s, kSr, {9.81}, {}, 0.03);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,z1,v1,z2,v2,zg");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 8);  // 0, 0.03, ..., 0.18 and t_end
  EXPECT_EQ(last.substr(0, last.find(',')), "2.0000000000000001e-01");
  EXPECT_THROW(trajectory_csv(s, kSr, {9.81}, {}, 0.0), InvalidArgument);
}

}  // namespace
}  // namespace qtwin
