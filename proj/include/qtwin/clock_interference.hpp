#pragma once

#include <functional>
#include <vector>

#include "qtwin/constants.hpp"
#include "qtwin/types.hpp"

namespace qtwin {

/// Exit-port signal of a two-state clock without state postselection.
struct BeatSignal {
  double p_a = 1.0;            // excited-state probability
  double p_b = 1.0;            // ground-state probability
  double p_combined = 1.0;     // (p_a + p_b)/2 from the per-state phases
  double p_closed_form = 1.0;  // ½[1 + envelope · cos(carrier_phase)]
  double envelope = 1.0;       // cos(ηΩΔτ/2), signed
  double carrier_phase = 0.0;  // ηω_CΔτ + ΔS_gk/ħ + ΔS_p/ħ, rad
  double delta_tau = 0.0;      // Δτ at the mean mass, s
  double eta = 1.0;
};

/// Largest tolerated |p_combined − p_closed_form|.
inline constexpr double kBeatConsistencyTol = 1e-12;

/// Phase breakdown of one internal state: Δτ and ω_j at m_j, the
/// mass-independent actions shared by both states.
PhaseBreakdown per_state_phase(const PulseSequence& seq, const ClockPair& clock,
                               ClockState state, const GravityEnv& env,
                               const InitialConditions& ics,
                               const PhysicalConstants& pc = kCodata2018);

/// (1 + cos Δφ)/2.
double fringe(double phase);
double fringe(const PulseSequence& seq, const Species& species, const GravityEnv& env,
              const InitialConditions& ics, const PhysicalConstants& pc = kCodata2018);
double fringe(const PulseSequence& seq, const ClockPair& clock, ClockState state,
              const GravityEnv& env, const InitialConditions& ics,
              const PhysicalConstants& pc = kCodata2018);

/// Evaluates the detected signal twice, from the two per-state fringes and
/// from the product form, in double-double arithmetic with the angles
/// reduced mod 2π. Throws NumericFailure if the two disagree by more than
/// kBeatConsistencyTol.
BeatSignal beat(const PulseSequence& seq, const ClockPair& clock, const GravityEnv& env,
                const InitialConditions& ics, const PhysicalConstants& pc = kCodata2018);

/// The two beat arguments and their η → 1 approximations (rad).
///   envelope: ηΩΔτ/2 = −(Δφ_a − Δφ_b)/2, approximated by ΩΔτ/2
///   carrier:  ηω_CΔτ + ΔS_gk/ħ + ΔS_p/ħ = (Δφ_a + Δφ_b)/2, approximated by
///             ω_CΔτ + ΔS_gk/ħ + ΔS_p/ħ
struct ClockLimitPhase {
  double phase_full = 0.0;
  double phase_eta1 = 0.0;
  double carrier_full = 0.0;
  double carrier_eta1 = 0.0;
};

ClockLimitPhase clock_limit_phase(const PulseSequence& seq, const ClockPair& clock,
                                  const GravityEnv& env, const InitialConditions& ics,
                                  const PhysicalConstants& pc = kCodata2018);

/// Builds the sequence for one value of a scanned parameter.
using SequenceFamily = std::function<PulseSequence(double)>;

struct VisibilityRow {
  double T = 0.0;
  double delta_tau = 0.0;
  double envelope = 1.0;
  double carrier_phase = 0.0;
  double p = 1.0;
};

/// One row per T. T = 0 is taken as the T → 0 limit: no phase, envelope 1.
std::vector<VisibilityRow> visibility_scan(const SequenceFamily& family,
                                           const std::vector<double>& T_values,
                                           const ClockPair& clock, const GravityEnv& env,
                                           const InitialConditions& ics = {},
                                           const PhysicalConstants& pc = kCodata2018);

struct EnvelopeZero {
  double parameter = 0.0;  // family argument at the zero
  double delta_tau = 0.0;  // Δτ there, s
  int iterations = 0;
};

/// Bisects the family argument on [lo, hi] for the first visibility zero,
/// ηΩ|Δτ| = π. The bracket must contain exactly one sign change of the
/// envelope. Stops when the bracket is narrower than rel_tol · |midpoint|.
EnvelopeZero locate_envelope_zero(const SequenceFamily& family, const ClockPair& clock,
                                  double lo, double hi, double rel_tol = 1e-13,
                                  const PhysicalConstants& pc = kCodata2018);

}  // namespace qtwin
