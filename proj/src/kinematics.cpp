#include "qtwin/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qtwin/errors.hpp"
#include "qtwin/exact_sum.hpp"

namespace qtwin {

BranchTrajectory kick_trajectory(const PulseSequence& seq, Branch branch,
                                 const Species& species, const PhysicalConstants& pc) {
  require_well_formed(seq);
  BranchTrajectory traj;
  traj.branch = branch;
  traj.mass = species.mass();
  const double recoil = pc.hbar / species.mass();

  const auto& pulses = seq.pulses;
  if (pulses.empty()) {
    traj.segments.push_back({0.0, seq.t_end, 0.0, 0.0});
    return traj;
  }
  const double origin = std::min(0.0, pulses.front().t);
  if (origin < pulses.front().t) {
    traj.segments.push_back({origin, pulses.front().t, 0.0, 0.0});
  }
  ExactSum cumulative_k;
  for (std::size_t n = 0; n < pulses.size(); ++n) {
    const double t_start = pulses[n].t;
    const double t_stop = n + 1 < pulses.size() ? pulses[n + 1].t : seq.t_end;
    ExactSum lever;  // Σ_{ℓ<n} (t_n − t_ℓ) k_ℓ
    for (std::size_t l = 0; l < n; ++l) {
      lever.add_product(t_start, pulses[l].k(branch));
      lever.add_product(-pulses[l].t, pulses[l].k(branch));
    }
    cumulative_k.add(pulses[n].k(branch));
    traj.segments.push_back(
        {t_start, t_stop, recoil * lever.value(), recoil * cumulative_k.value()});
  }
  return traj;
}

FreeFallPolynomial free_fall_polynomial(const GravityEnv& env,
                                        const InitialConditions& ics) {
  if (env.gradient != 0.0) {
    throw UnsupportedPotential(
        "closed-form valid only for linear potential (gravity gradient must be 0)");
  }
  return {ics.z0, ics.v0, -0.5 * env.g};
}

KinematicState gravity_trajectory(const GravityEnv& env, const InitialConditions& ics,
                                  double t) {
  const FreeFallPolynomial p = free_fall_polynomial(env, ics);
  return {p.c0 + p.c1 * t + p.c2 * t * t, ics.v0 - env.g * t};
}

KinematicState kick_state(const PulseSequence& seq, const BranchTrajectory& traj,
                          double t) {
  const auto& segs = traj.segments;
  if (t >= seq.t_end) {
    const auto& last = segs.back();
    return {last.z_start + last.velocity * (t - last.t_start), last.velocity};
  }
  if (seq.pulses.empty() || t <= seq.pulses.front().t) return {0.0, 0.0};
  // first segment ending at or after t: a pulse time belongs to the segment
  // before it, so the kick at t is not yet applied
  const auto it = std::lower_bound(segs.begin(), segs.end(), t,
                                   [](const BranchTrajectory::Segment& s, double x) {
                                     return s.t_end < x;
                                   });
  return {it->z_start + it->velocity * (t - it->t_start), it->velocity};
}

KinematicState sample(const PulseSequence& seq, Branch branch, const Species& species,
                      const GravityEnv& env, const InitialConditions& ics, double t,
                      const PhysicalConstants& pc) {
  if (!(t >= 0.0 && t <= seq.t_end)) {
    throw InvalidArgument(
        fmt::format("sample time {} outside [0, {}]", t, seq.t_end));
  }
  const KinematicState g = gravity_trajectory(env, ics, t);
  const KinematicState k = kick_state(seq, kick_trajectory(seq, branch, species, pc), t);
  return {g.z + k.z, g.v + k.v};
}

std::string trajectory_csv(const PulseSequence& seq, const Species& species,
                           const GravityEnv& env, const InitialConditions& ics, double dt,
                           const PhysicalConstants& pc) {
  if (!std::isfinite(dt) || dt <= 0.0) {
    throw InvalidArgument(fmt::format("sampling step must be positive, got {}", dt));
  }
  const BranchTrajectory upper = kick_trajectory(seq, Branch::upper, species, pc);
  const BranchTrajectory lower = kick_trajectory(seq, Branch::lower, species, pc);
  std::string out = "t,z1,v1,z2,v2,zg\n";
  const auto row = [&](double t) {
    const KinematicState g = gravity_trajectory(env, ics, t);
    const KinematicState a = kick_state(seq, upper, t);
    const KinematicState b = kick_state(seq, lower, t);
    out += fmt::format("{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n", t, g.z + a.z,
                       g.v + a.v, g.z + b.z, g.v + b.v, g.z);
  };
  const auto n = static_cast<long long>(std::floor(seq.t_end / dt));
  for (long long i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (t < seq.t_end) row(t);
  }
  row(seq.t_end);
  return out;
}

}  // namespace qtwin
