#pragma once

namespace qtwin {

/// Physical constants used by every closed form and by the numeric oracle.
/// Values are CODATA 2018 (SI); c is exact by definition.
struct PhysicalConstants {
  double c = 299792458.0;          // m/s
  double hbar = 1.054571817e-34;   // J s
};

/// The constants used unless a caller (typically a test) passes its own.
inline constexpr PhysicalConstants kCodata2018{};

/// Effective two-photon wave number of magic Bragg diffraction in Sr (1/m).
inline constexpr double kMagicWaveNumber = 1.5e7;

/// Rest mass of Sr-87 (kg).
inline constexpr double kStrontium87Mass = 1.443157e-25;

/// Angular frequency of the Sr 698 nm clock transition, 2π × 429.228 THz.
inline constexpr double kStrontiumClockOmega = 2.696928e15;

}  // namespace qtwin
