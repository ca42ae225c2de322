#pragma once

#include "qtwin/constants.hpp"
#include "qtwin/exact_sum.hpp"
#include "qtwin/types.hpp"

namespace qtwin {

/// Recoil double sum Σ_n Σ_{ℓ≤n} [k_n¹k_ℓ¹ − k_n²k_ℓ²](t_n − t_ℓ) in s/m²,
/// as a correctly rounded pair hi + lo. No validation.
TwoTerm recoil_double_sum(const PulseSequence& seq);

/// Throws InvalidSequence for invalid and OpenGeometry for open sequences.
void require_closed(const PulseSequence& seq);

/// Δτ = ħ²/(2m²c²) · Σ_n Σ_{ℓ≤n} [k_n¹k_ℓ¹ − k_n²k_ℓ²](t_n − t_ℓ).
/// Depends on the kicks and pulse times only.
double proper_time_difference(const PulseSequence& seq, const Species& species,
                              const PhysicalConstants& pc = kCodata2018);

/// ω_C Δτ = (ħ/2m) · Σ_n Σ_{ℓ≤n} [...](t_n − t_ℓ), evaluated directly.
double recoil_phase(const PulseSequence& seq, const Species& species,
                    const PhysicalConstants& pc = kCodata2018);

/// ΔS_gk/ħ = Σ_ℓ Δk_ℓ z_g(t_ℓ), summed exactly and rounded once.
/// Throws UnsupportedPotential for a nonzero gravity gradient.
double gravito_recoil_phase(const PulseSequence& seq, const GravityEnv& env,
                            const InitialConditions& ics);
TwoTerm gravito_recoil_pair(const PulseSequence& seq, const GravityEnv& env,
                            const InitialConditions& ics);

/// ΔS_p/ħ = Σ_ℓ (φ_ℓ¹ − φ_ℓ²).
double laser_phase(const PulseSequence& seq);
TwoTerm laser_phase_pair(const PulseSequence& seq);

/// Full decomposition; total = recoil + gravito-recoil + laser phase.
PhaseBreakdown total_phase(const PulseSequence& seq, const Species& species,
                           const GravityEnv& env, const InitialConditions& ics,
                           const PhysicalConstants& pc = kCodata2018);

}  // namespace qtwin
