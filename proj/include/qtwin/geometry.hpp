#pragma once

#include <string>
#include <string_view>

#include "qtwin/constants.hpp"
#include "qtwin/types.hpp"

namespace qtwin {

/// Phase-space closure of a sequence. Moments are sums over the
/// differential kicks Δk_ℓ = k_ℓ^upper − k_ℓ^lower.
struct ClosureReport {
  double delta_z_final = 0.0;  // m, upper − lower at t_end
  double delta_v_final = 0.0;  // m/s
  double moment0 = 0.0;        // Σ Δk_ℓ
  double moment1 = 0.0;        // Σ t_ℓ Δk_ℓ
  double moment2 = 0.0;        // Σ t_ℓ² Δk_ℓ
  double tol0 = 0.0;
  double tol1 = 0.0;
  bool closed = false;
};

/// Relative closure tolerance applied to moment 0 and moment 1.
inline constexpr double kClosureRelTol = 1e-12;

// Builders. Branch 1 (upper) receives the first kick. RBI and double-loop
// times are placed on a binary grid fine enough that every pulse time and
// every time difference is an exact double, which makes the sequences close
// exactly; T and T′ move by at most about one ulp of the longest time.

/// Mach-Zehnder: pulses at (0, T, 2T), upper (+k, −k, 0), lower (0, +k, −k).
PulseSequence build_mzi(double k, double T);

/// Symmetric Ramsey-Bordé: pulses at (0, T, T+T′, 2T+T′),
/// upper (+k, −k, 0, 0), lower (0, 0, +k, −k). For T′ = 0 the two central
/// pulses coincide and are merged.
PulseSequence build_rbi_symmetric(double k, double T, double Tp);

/// Asymmetric Ramsey-Bordé: same times, upper (+k, −k, −k, +k), lower
/// unkicked. Δτ = −(ħk/mc)² T for every T′.
PulseSequence build_rbi_asymmetric(double k, double T, double Tp);

/// Double-loop RBI: pulses at (0, T, 3T, 4T), upper (+k, −2k, +2k, −k),
/// lower unkicked. Moments 0, 1 and 2 vanish.
PulseSequence build_rbi_double_loop(double k, double T);

ClosureReport closure_check(const PulseSequence& seq, const Species& species,
                            const PhysicalConstants& pc = kCodata2018);

/// Parses the line-oriented geometry format:
///
///   # comment
///   name <token>
///   tend <float>
///   pulse <t> <k1> <k2> [<phi1> <phi2>]
///
/// Throws GeometryParseError with line and column of the offending token.
PulseSequence parse_geometry(std::string_view text);

/// Canonical text: header then one line per pulse, every number with 17
/// significant digits. Phase columns appear when any phase is not +0.
std::string serialize_geometry(const PulseSequence& seq);

}  // namespace qtwin
