#include "qtwin/phase_engine.hpp"

#include <fmt/format.h>

#include "qtwin/errors.hpp"
#include "qtwin/geometry.hpp"
#include "qtwin/kinematics.hpp"

namespace qtwin {

TwoTerm recoil_double_sum(const PulseSequence& seq) {
  const auto& p = seq.pulses;
  ExactSum sum;
  for (std::size_t n = 0; n < p.size(); ++n) {
    for (std::size_t l = 0; l < n; ++l) {
      // (t_n − t_ℓ) is not formed in floating point; both products enter
      // the sum exactly
      for (const double t : {p[n].t, -p[l].t}) {
        sum.add_product(p[n].k_upper, p[l].k_upper, t);
        sum.add_product(-p[n].k_lower, p[l].k_lower, t);
      }
    }
  }
  return sum.value_pair();
}

void require_closed(const PulseSequence& seq) {
  require_valid(seq);
  // the closure flag carries no mass dependence; any species will do
  const ClosureReport r = closure_check(seq, Species(1.0));
  if (!r.closed) {
    throw OpenGeometry(fmt::format(
        "sequence '{}' is not closed in phase space (Σ Δk = {:.6e} /m, Σ t Δk = {:.6e} s/m)",
        seq.name, r.moment0, r.moment1));
  }
}

double proper_time_difference(const PulseSequence& seq, const Species& species,
                              const PhysicalConstants& pc) {
  require_closed(seq);
  const double m = species.mass();
  const double prefactor = (pc.hbar * pc.hbar) / (2.0 * m * m * pc.c * pc.c);
  return prefactor * recoil_double_sum(seq).hi;
}

double recoil_phase(const PulseSequence& seq, const Species& species,
                    const PhysicalConstants& pc) {
  require_closed(seq);
  return pc.hbar / (2.0 * species.mass()) * recoil_double_sum(seq).hi;
}

TwoTerm gravito_recoil_pair(const PulseSequence& seq, const GravityEnv& env,
                            const InitialConditions& ics) {
  const FreeFallPolynomial zg = free_fall_polynomial(env, ics);
  ExactSum sum;
  for (const Pulse& p : seq.pulses) {
    const TwoTerm t2 = two_prod(p.t, p.t);
    for (const double k : {p.k_upper, -p.k_lower}) {
      sum.add_product(k, zg.c0);
      sum.add_product(k, zg.c1, p.t);
      sum.add_product(k, zg.c2, t2.hi);
      sum.add_product(k, zg.c2, t2.lo);
    }
  }
  return sum.value_pair();
}

double gravito_recoil_phase(const PulseSequence& seq, const GravityEnv& env,
                            const InitialConditions& ics) {
  return gravito_recoil_pair(seq, env, ics).hi;
}

TwoTerm laser_phase_pair(const PulseSequence& seq) {
  ExactSum sum;
  for (const Pulse& p : seq.pulses) {
    sum.add(p.phi_upper);
    sum.add(-p.phi_lower);
  }
  return sum.value_pair();
}

double laser_phase(const PulseSequence& seq) { return laser_phase_pair(seq).hi; }

PhaseBreakdown total_phase(const PulseSequence& seq, const Species& species,
                           const GravityEnv& env, const InitialConditions& ics,
                           const PhysicalConstants& pc) {
  PhaseBreakdown b;
  b.delta_tau = proper_time_difference(seq, species, pc);
  b.recoil_phase = recoil_phase(seq, species, pc);
  b.gravito_recoil = gravito_recoil_phase(seq, env, ics);
  b.laser_phase = laser_phase(seq);
  b.total_phase = b.recoil_phase + b.gravito_recoil + b.laser_phase;
  return b;
}

}  // namespace qtwin
