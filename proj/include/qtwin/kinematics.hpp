#pragma once

#include <string>
#include <vector>

#include "qtwin/constants.hpp"
#include "qtwin/types.hpp"

namespace qtwin {

/// Position and velocity at one instant.
struct KinematicState {
  double z = 0.0;  // m
  double v = 0.0;  // m/s
};

/// Kick part z_k of one branch: piecewise linear, starting at rest at the
/// origin. Initial conditions live entirely in the gravity part.
struct BranchTrajectory {
  struct Segment {
    double t_start;
    double t_end;
    double z_start;   // m
    double velocity;  // m/s
  };

  Branch branch = Branch::upper;
  double mass = 0.0;
  std::vector<Segment> segments;
};

/// z_k(t) = Σ_{t_ℓ < t} (t − t_ℓ) ħ k_ℓ / m.
BranchTrajectory kick_trajectory(const PulseSequence& seq, Branch branch,
                                 const Species& species,
                                 const PhysicalConstants& pc = kCodata2018);

/// Coefficients of z_g(t) = c0 + c1 t + c2 t² for a linear potential.
struct FreeFallPolynomial {
  double c0;
  double c1;
  double c2;
};

/// Throws UnsupportedPotential if the gradient is nonzero.
FreeFallPolynomial free_fall_polynomial(const GravityEnv& env,
                                        const InitialConditions& ics);

/// z_g(t) = z0 + v0 t − g t²/2, ż_g = v0 − g t.
KinematicState gravity_trajectory(const GravityEnv& env, const InitialConditions& ics,
                                  double t);

/// Kick part at time t. Velocity includes kicks with t_ℓ < t; at t_end it
/// includes every kick.
KinematicState kick_state(const PulseSequence& seq, const BranchTrajectory& traj,
                          double t);

/// Full branch state z = z_g + z_k at t ∈ [0, t_end].
KinematicState sample(const PulseSequence& seq, Branch branch, const Species& species,
                      const GravityEnv& env, const InitialConditions& ics, double t,
                      const PhysicalConstants& pc = kCodata2018);

/// CSV dump with columns t,z1,v1,z2,v2,zg sampled every `dt` from 0 to t_end
/// (t_end always included). No header lines are written.
std::string trajectory_csv(const PulseSequence& seq, const Species& species,
                           const GravityEnv& env, const InitialConditions& ics, double dt,
                           const PhysicalConstants& pc = kCodata2018);

}  // namespace qtwin
