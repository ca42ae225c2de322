#include "qtwin/clock_interference.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qtwin/double_double.hpp"
#include "qtwin/errors.hpp"
#include "qtwin/phase_engine.hpp"

namespace qtwin {

namespace {

DoubleDouble dd(TwoTerm t) { return {t.hi, t.lo}; }

// Phase ingredients in double-double precision. The recoil parts carry
// ħS/(2m_j); the actions ΔS_gk/ħ + ΔS_p/ħ are shared by both states.
struct ClockTerms {
  DoubleDouble hbar_s;  // ħ · S
  DoubleDouble shared;
  DoubleDouble m;
  DoubleDouble dm;
  DoubleDouble m_a;
  DoubleDouble m_b;
  DoubleDouble eta;
};

ClockTerms clock_terms(const PulseSequence& seq, const ClockPair& clock,
                       const GravityEnv& env, const InitialConditions& ics,
                       const PhysicalConstants& pc) {
  require_closed(seq);
  ClockTerms c;
  c.hbar_s = DoubleDouble(pc.hbar) * dd(recoil_double_sum(seq));
  c.shared = dd(gravito_recoil_pair(seq, env, ics)) + dd(laser_phase_pair(seq));
  c.m = clock.mean_mass();
  c.dm = clock.mass_splitting();
  const DoubleDouble half = c.dm * DoubleDouble(0.5);
  c.m_a = c.m + half;
  c.m_b = c.m - half;
  const DoubleDouble x = half / c.m;
  c.eta = DoubleDouble(1.0) / (DoubleDouble(1.0) - x * x);
  return c;
}

DoubleDouble state_recoil(const ClockTerms& c, const DoubleDouble& m_j) {
  return c.hbar_s / (DoubleDouble(2.0) * m_j);
}

// ΩΔτ/2 at the mean mass: ħ S Δm / (4 m²)
DoubleDouble half_omega_dtau(const ClockTerms& c) {
  return c.hbar_s * c.dm / (DoubleDouble(4.0) * c.m * c.m);
}

}  // namespace

PhaseBreakdown per_state_phase(const PulseSequence& seq, const ClockPair& clock,
                               ClockState state, const GravityEnv& env,
                               const InitialConditions& ics, const PhysicalConstants& pc) {
  return total_phase(seq, Species(clock.mass(state)), env, ics, pc);
}

double fringe(double phase) { return 0.5 * (1.0 + std::cos(phase)); }

double fringe(const PulseSequence& seq, const Species& species, const GravityEnv& env,
              const InitialConditions& ics, const PhysicalConstants& pc) {
  return fringe(total_phase(seq, species, env, ics, pc).total_phase);
}

double fringe(const PulseSequence& seq, const ClockPair& clock, ClockState state,
              const GravityEnv& env, const InitialConditions& ics,
              const PhysicalConstants& pc) {
  return fringe(per_state_phase(seq, clock, state, env, ics, pc).total_phase);
}

BeatSignal beat(const PulseSequence& seq, const ClockPair& clock, const GravityEnv& env,
                const InitialConditions& ics, const PhysicalConstants& pc) {
  const ClockTerms c = clock_terms(seq, clock, env, ics, pc);

  const DoubleDouble phi_a = state_recoil(c, c.m_a) + c.shared;
  const DoubleDouble phi_b = state_recoil(c, c.m_b) + c.shared;
  const DoubleDouble carrier = c.eta * state_recoil(c, c.m) + c.shared;

  BeatSignal s;
  s.p_a = 0.5 * (1.0 + cos_dd(phi_a));
  s.p_b = 0.5 * (1.0 + cos_dd(phi_b));
  s.p_combined = 0.5 * (s.p_a + s.p_b);
  s.envelope = cos_dd(c.eta * half_omega_dtau(c));
  s.carrier_phase = carrier.to_double();
  s.p_closed_form = 0.5 * (1.0 + s.envelope * cos_dd(carrier));
  s.delta_tau = proper_time_difference(seq, Species(clock.mean_mass()), pc);
  s.eta = clock.eta();

  const double diff = std::abs(s.p_combined - s.p_closed_form);
  if (!(diff <= kBeatConsistencyTol)) {
    throw NumericFailure(fmt::format(
        "beat signal inconsistent: per-state {:.17g} vs product form {:.17g}",
        s.p_combined, s.p_closed_form));
  }
  return s;
}

ClockLimitPhase clock_limit_phase(const PulseSequence& seq, const ClockPair& clock,
                                  const GravityEnv& env, const InitialConditions& ics,
                                  const PhysicalConstants& pc) {
  const ClockTerms c = clock_terms(seq, clock, env, ics, pc);
  const DoubleDouble rec_a = state_recoil(c, c.m_a);
  const DoubleDouble rec_b = state_recoil(c, c.m_b);
  const DoubleDouble half(0.5);

  ClockLimitPhase r;
  r.phase_full = (half * (rec_b - rec_a)).to_double();
  r.phase_eta1 = half_omega_dtau(c).to_double();
  r.carrier_full = (half * (rec_a + rec_b) + c.shared).to_double();
  r.carrier_eta1 = (state_recoil(c, c.m) + c.shared).to_double();
  return r;
}

std::vector<VisibilityRow> visibility_scan(const SequenceFamily& family,
                                           const std::vector<double>& T_values,
                                           const ClockPair& clock, const GravityEnv& env,
                                           const InitialConditions& ics,
                                           const PhysicalConstants& pc) {
  std::vector<VisibilityRow> rows;
  rows.reserve(T_values.size());
  for (const double T : T_values) {
    VisibilityRow row;
    row.T = T;
    if (T != 0.0) {
      const BeatSignal b = beat(family(T), clock, env, ics, pc);
      row.delta_tau = b.delta_tau;
      row.envelope = b.envelope;
      row.carrier_phase = b.carrier_phase;
      row.p = b.p_combined;
    }
    rows.push_back(row);
  }
  return rows;
}

EnvelopeZero locate_envelope_zero(const SequenceFamily& family, const ClockPair& clock,
                                  double lo, double hi, double rel_tol,
                                  const PhysicalConstants& pc) {
  const auto envelope = [&](double x) {
    return beat(family(x), clock, GravityEnv{}, InitialConditions{}, pc).envelope;
  };
  double f_lo = envelope(lo);
  const double f_hi = envelope(hi);
  if (!(f_lo * f_hi < 0.0)) {
    throw InvalidArgument(fmt::format(
        "envelope does not change sign on [{}, {}] ({} and {})", lo, hi, f_lo, f_hi));
  }
  EnvelopeZero z;
  double mid = 0.5 * (lo + hi);
  while (z.iterations < 200 && hi - lo > rel_tol * std::abs(mid)) {
    const double f_mid = envelope(mid);
    if (f_mid == 0.0) break;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    ++z.iterations;
  }
  z.parameter = mid;
  z.delta_tau = proper_time_difference(family(mid), Species(clock.mean_mass()), pc);
  return z;
}

}  // namespace qtwin
