#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtwin/constants.hpp"
#include "qtwin/types.hpp"

namespace qtwin {

// Independent check of the closed forms: every delta kick is replaced by a
// finite pulse of width σ centred on its time, the equations of motion
//   z̈ = −g − Γ z + a_pulse(t)
// are integrated with fixed-step RK4, and the proper time and the
// interaction action are evaluated by composite Simpson quadrature.

enum class PulseShape { top_hat, raised_cosine };

const char* to_string(PulseShape shape) noexcept;

struct OracleConfig {
  double pulse_width = 0.0;    // σ, s
  int steps_per_segment = 200;  // RK4 steps per window and per gap; even, ≥ 100
  PulseShape shape = PulseShape::top_hat;
};

/// Largest tolerated relative impulse error of a single pulse.
inline constexpr double kImpulseRelTol = 1e-6;

/// Smallest spacing between consecutive pulse times (+∞ below two pulses).
double min_pulse_spacing(const PulseSequence& seq);

/// Throws OracleConfigError unless 0 < σ < min spacing / 2 and the step
/// count is even and at least 100.
void validate_config(const PulseSequence& seq, const OracleConfig& cfg);

/// One integration interval: a pulse window or a pulse-free gap.
struct SampledInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  int pulse = -1;  // index of the pulse whose window this is, −1 for a gap
  std::vector<double> t;
  std::vector<double> z;
  std::vector<double> v;
  // Deviation from the free trajectory through (z0, v0); z = z_free + z_dev.
  std::vector<double> z_dev;
  std::vector<double> v_dev;
};

struct SampledTrajectory {
  std::vector<SampledInterval> intervals;
  /// Per pulse: |∫a dt − ħk/m| / |ħk/m| over its window, 0 for k = 0.
  std::vector<double> impulse_rel_error;
};

/// Integrates one branch from min(0, t_1 − σ/2) to max(t_end, t_M + σ/2),
/// starting from the free-fall state through (z0, v0) at t = 0. The ODE is
/// integrated for the deviation from that free trajectory, which keeps the
/// branch separation accurate when z itself is large. Throws
/// NumericFailure("step too coarse") if any pulse impulse is off by more
/// than kImpulseRelTol.
SampledTrajectory integrate_branch(const PulseSequence& seq, Branch branch,
                                   const Species& species, const GravityEnv& env,
                                   const InitialConditions& ics, const OracleConfig& cfg,
                                   const PhysicalConstants& pc = kCodata2018);

/// Numerical counterparts of the closed forms and the residuals between them.
/// Closed-form fields are empty for a nonzero gravity gradient.
struct OracleResult {
  double sigma = 0.0;
  int steps = 0;
  PulseShape shape = PulseShape::top_hat;

  double delta_tau_numeric = 0.0;        // s
  double quadrature_tolerance = 0.0;     // s, step-halving + rounding bound
  double recoil_phase_numeric = 0.0;     // ω_C Δτ, rad
  double em_action_numeric = 0.0;        // ΔS_em/ħ, rad
  double gravito_recoil_numeric = 0.0;   // ∫ Δκ z_free dt, rad
  double total_phase_numeric = 0.0;      // −ω_CΔτ + ΔS_em/ħ, rad
  double decomposition_residual = 0.0;   // ΔS_em/ħ − 2ω_CΔτ − ΔS_gk/ħ − ΔS_p/ħ, rad
  double max_impulse_error = 0.0;        // relative
  double closure_delta_z = 0.0;          // m, at the end of integration
  double closure_delta_v = 0.0;          // m/s

  std::optional<double> delta_tau_closed;
  std::optional<double> gravito_recoil_closed;
  std::optional<double> total_phase_closed;
  std::optional<double> rel_residual;          // Δτ
  std::optional<double> gravito_rel_residual;
  std::optional<double> total_rel_residual;
};

/// Normalisation used when a closed-form target is exactly zero.
double zero_target_delta_tau_scale(const PulseSequence& seq, const Species& species,
                                   const PhysicalConstants& pc = kCodata2018);
double zero_target_phase_scale(const PulseSequence& seq, const Species& species,
                               const PhysicalConstants& pc = kCodata2018);

/// Proper-time difference ∫ {[−(ż¹)² + (ż²)²]/2 + U(z¹) − U(z²)} dt / c²
/// with U = g z + Γ z²/2. Requires a valid sequence closed in phase space.
double proper_time_numeric(const PulseSequence& seq, const Species& species,
                           const GravityEnv& env, const InitialConditions& ics,
                           const OracleConfig& cfg,
                           const PhysicalConstants& pc = kCodata2018);

/// Runs the full comparison: both branches, the free trajectory, and a
/// step-halved rerun for the quadrature tolerance.
OracleResult run_oracle(const PulseSequence& seq, const Species& species,
                        const GravityEnv& env, const InitialConditions& ics,
                        const OracleConfig& cfg,
                        const PhysicalConstants& pc = kCodata2018);

struct ConvergencePoint {
  double sigma = 0.0;
  double rel_residual = 0.0;  // Δτ vs closed form
  double floor = 0.0;         // relative quadrature tolerance
  OracleResult result;
};

struct ConvergenceStudy {
  std::vector<ConvergencePoint> points;
  bool monotone = true;  // residuals decrease wherever they exceed the floor
  double exponent = 0.0;  // least-squares slope of log residual vs log σ
};

/// Widths must be strictly decreasing. With `parallel`, widths are
/// evaluated concurrently; results do not depend on it.
ConvergenceStudy convergence_study(const PulseSequence& seq, const Species& species,
                                   const GravityEnv& env, const InitialConditions& ics,
                                   const std::vector<double>& widths,
                                   int steps_per_segment = 200,
                                   PulseShape shape = PulseShape::top_hat,
                                   bool parallel = true,
                                   const PhysicalConstants& pc = kCodata2018);

}  // namespace qtwin
