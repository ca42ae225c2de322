#pragma once

// Helpers shared by the unit tests and the acceptance runner: seeded random
// geometries and reference evaluations in binary128 arithmetic that do not
// use the library's summation code.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "qtwin/constants.hpp"
#include "qtwin/types.hpp"

namespace qtwin::testing {

using Quad = __float128;

inline double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

/// Δτ from the double sum, evaluated term by term in binary128.
inline double reference_delta_tau(const PulseSequence& seq, double mass,
                                  const PhysicalConstants& pc = kCodata2018) {
  Quad sum = 0;
  const auto& p = seq.pulses;
  for (std::size_t n = 0; n < p.size(); ++n) {
    for (std::size_t l = 0; l <= n; ++l) {
      const Quad dt = Quad(p[n].t) - Quad(p[l].t);
      sum += (Quad(p[n].k_upper) * Quad(p[l].k_upper) -
              Quad(p[n].k_lower) * Quad(p[l].k_lower)) *
             dt;
    }
  }
  const Quad hb = pc.hbar;
  const Quad m = mass;
  const Quad c = pc.c;
  return static_cast<double>(hb * hb / (2 * m * m * c * c) * sum);
}

/// ΔS_gk/ħ = Σ Δk_ℓ (z0 + v0 t_ℓ − g t_ℓ²/2) in binary128.
inline double reference_gravito_recoil(const PulseSequence& seq, double g, double z0,
                                       double v0) {
  Quad sum = 0;
  for (const Pulse& p : seq.pulses) {
    const Quad t = p.t;
    const Quad zg = Quad(z0) + Quad(v0) * t - Quad(g) * t * t / 2;
    sum += (Quad(p.k_upper) - Quad(p.k_lower)) * zg;
  }
  return static_cast<double>(sum);
}

struct RandomGeometryOptions {
  int min_pulses = 3;
  int max_pulses = 8;
  double min_spacing = 0.01;  // s
  double max_spacing = 0.2;   // s
  double max_k = 2e7;         // 1/m
};

/// Random sequence closed in phase space: random times and kicks, with the
/// lower-branch kicks of the last two pulses solved so that Σ Δk = 0 and
/// Σ t Δk = 0. Laser phases are random when `with_phases` is set.
inline PulseSequence random_closed_geometry(std::mt19937_64& rng,
                                            const RandomGeometryOptions& opt = {},
                                            bool with_phases = false) {
  std::uniform_int_distribution<int> count(opt.min_pulses, opt.max_pulses);
  std::uniform_real_distribution<double> spacing(opt.min_spacing, opt.max_spacing);
  std::uniform_real_distribution<double> kick(-opt.max_k, opt.max_k);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);

  PulseSequence seq;
  seq.name = "random";
  const int M = count(rng);
  double t = 0.0;
  for (int i = 0; i < M; ++i) {
    Pulse p;
    p.t = t;
    p.k_upper = kick(rng);
    p.k_lower = kick(rng);
    if (with_phases) {
      p.phi_upper = phase(rng);
      p.phi_lower = phase(rng);
    }
    seq.pulses.push_back(p);
    t += spacing(rng);
  }
  Quad r0 = 0;
  Quad r1 = 0;
  for (int i = 0; i < M; ++i) {
    const Pulse& p = seq.pulses[static_cast<std::size_t>(i)];
    r0 += p.k_upper;
    r1 += Quad(p.t) * p.k_upper;
    if (i < M - 2) {
      r0 -= p.k_lower;
      r1 -= Quad(p.t) * p.k_lower;
    }
  }
  Pulse& a = seq.pulses[static_cast<std::size_t>(M - 2)];
  Pulse& b = seq.pulses[static_cast<std::size_t>(M - 1)];
  const Quad y = (r1 - Quad(a.t) * r0) / (Quad(b.t) - Quad(a.t));
  a.k_lower = static_cast<double>(r0 - y);
  b.k_lower = static_cast<double>(y);
  seq.t_end = b.t;
  return seq;
}

/// The same sequence with every pulse time multiplied by `factor`.
inline PulseSequence scale_times(PulseSequence seq, double factor) {
  for (Pulse& p : seq.pulses) p.t *= factor;
  seq.t_end *= factor;
  return seq;
}

}  // namespace qtwin::testing
