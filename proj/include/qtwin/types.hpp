#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qtwin/constants.hpp"

namespace qtwin {

/// Interferometer branch. Builders give the first nonzero kick to `upper`.
enum class Branch { upper = 1, lower = 2 };

/// Internal state of a two-level clock: `a` excited, `b` ground.
enum class ClockState { a, b };

/// A species of point-like atom, characterised by its rest mass.
class Species {
 public:
  /// Throws InvalidArgument unless mass is finite and positive.
  explicit Species(double mass, std::string label = {});

  double mass() const noexcept { return mass_; }
  const std::string& label() const noexcept { return label_; }

 private:
  double mass_;
  std::string label_;
};

/// Two internal states with masses m ± Δm/2, where Δm = ħΩ/c².
class ClockPair {
 public:
  /// Throws InvalidArgument unless mean_mass > 0, Ω ≥ 0 and Δm < 2m.
  ClockPair(double mean_mass, double splitting_omega,
            const PhysicalConstants& pc = kCodata2018);

  /// Clock pair with Δm = ratio · m (convenience for Δm/m scans).
  static ClockPair from_mass_ratio(double mean_mass, double ratio,
                                   const PhysicalConstants& pc = kCodata2018);

  double mean_mass() const noexcept { return mean_mass_; }
  double splitting_omega() const noexcept { return omega_; }
  double mass_splitting() const noexcept { return delta_m_; }
  double mass_a() const noexcept { return mean_mass_ + 0.5 * delta_m_; }
  double mass_b() const noexcept { return mean_mass_ - 0.5 * delta_m_; }
  double mass(ClockState s) const noexcept {
    return s == ClockState::a ? mass_a() : mass_b();
  }
  /// η = 1 / [1 − (Δm/2m)²]; exactly 1 when Δm = 0.
  double eta() const noexcept { return eta_; }

 private:
  double mean_mass_;
  double omega_;
  double delta_m_;
  double eta_;
};

/// One light pulse: time, branch-dependent wave-number transfer and phase.
struct Pulse {
  double t = 0.0;          // s
  double k_upper = 0.0;    // 1/m
  double k_lower = 0.0;    // 1/m
  double phi_upper = 0.0;  // rad
  double phi_lower = 0.0;  // rad

  double k(Branch b) const noexcept {
    return b == Branch::upper ? k_upper : k_lower;
  }
  double delta_k() const noexcept { return k_upper - k_lower; }

  bool operator==(const Pulse&) const = default;
};

struct PulseSequence {
  std::string name;
  std::vector<Pulse> pulses;
  double t_end = 0.0;  // s

  bool operator==(const PulseSequence&) const = default;
};

/// Uniform gravity g along −z. The gradient is carried for validation only.
struct GravityEnv {
  double g = 0.0;         // m/s²
  double gradient = 0.0;  // 1/s²
};

struct InitialConditions {
  double z0 = 0.0;  // m
  double v0 = 0.0;  // m/s
};

/// Phase decomposition of one internal state. Actions are divided by ħ.
struct PhaseBreakdown {
  double delta_tau = 0.0;       // s
  double recoil_phase = 0.0;    // ω_C Δτ, rad
  double gravito_recoil = 0.0;  // ΔS_gk/ħ, rad
  double laser_phase = 0.0;     // ΔS_p/ħ, rad
  double total_phase = 0.0;     // rad
};

enum class ViolationRule {
  non_finite_field,
  non_monotone_times,
  non_finite_duration,
  end_before_last_pulse,
  too_few_pulses,
};

const char* to_string(ViolationRule rule) noexcept;

struct Violation {
  std::optional<std::size_t> pulse_index;
  ViolationRule rule;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Reports every broken sequence invariant; never throws. The report is
/// sorted by (pulse index, rule), sequence-level violations first.
std::vector<Violation> validate_sequence(const PulseSequence& seq);

/// Throws InvalidSequence listing the violations, if any.
void require_valid(const PulseSequence& seq);

/// Like require_valid, but accepts sequences with fewer than two pulses.
void require_well_formed(const PulseSequence& seq);

/// ω_C = m c² / ħ.
double compton_frequency(const Species& species,
                         const PhysicalConstants& pc = kCodata2018);

/// Exchanges upper and lower kicks and phases on every pulse.
PulseSequence swap_branches(PulseSequence seq);

}  // namespace qtwin
