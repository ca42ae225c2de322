#include "qtwin/numeric_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "qtwin/errors.hpp"
#include "qtwin/phase_engine.hpp"

namespace qtwin {

namespace {

struct State {
  double z;
  double v;
  double p;  // accumulated pulse impulse per unit mass
};

// Free motion under z̈ = −g − Γz through (z0, v0) at t = 0. The forms with
// sin²/sinh² avoid the cancellation in 1 − cos for small Γ t².
State free_state(const GravityEnv& env, const InitialConditions& ics, double t) {
  const double G = env.gradient;
  if (G == 0.0) {
    return {ics.z0 + ics.v0 * t - 0.5 * env.g * t * t, ics.v0 - env.g * t, 0.0};
  }
  const double w = std::sqrt(std::abs(G));
  const double x = w * t;
  if (G > 0.0) {
    const double s = std::sin(0.5 * x);
    const double one_minus_c = 2.0 * s * s;
    return {ics.z0 * (1.0 - one_minus_c) + ics.v0 * std::sin(x) / w -
                env.g * one_minus_c / G,
            -ics.z0 * w * std::sin(x) + ics.v0 * std::cos(x) - env.g * std::sin(x) / w,
            0.0};
  }
  const double s = std::sinh(0.5 * x);
  const double c_minus_one = 2.0 * s * s;
  return {ics.z0 * (1.0 + c_minus_one) + ics.v0 * std::sinh(x) / w -
              env.g * c_minus_one / (w * w),
          ics.z0 * w * std::sinh(x) + ics.v0 * std::cosh(x) - env.g * std::sinh(x) / w,
          0.0};
}

double shape_value(PulseShape shape, double u) {
  if (shape == PulseShape::top_hat) return 1.0;
  return 1.0 - std::cos(2.0 * std::numbers::pi * u);
}

struct Span {
  double a;
  double b;
  int pulse;
};

std::vector<Span> integration_spans(const PulseSequence& seq, double sigma) {
  std::vector<Span> spans;
  const auto& p = seq.pulses;
  double cur = p.empty() ? 0.0 : std::min(0.0, p.front().t - 0.5 * sigma);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double ws = p[i].t - 0.5 * sigma;
    const double we = p[i].t + 0.5 * sigma;
    if (ws > cur) spans.push_back({cur, ws, -1});
    spans.push_back({ws, we, static_cast<int>(i)});
    cur = we;
  }
  if (seq.t_end > cur) spans.push_back({cur, seq.t_end, -1});
  return spans;
}

// Acceleration of one branch inside a span. The amplitude is normalised to
// the window length as represented, so the impulse is ħk/m exactly.
struct Forcing {
  double amplitude = 0.0;  // m/s²
  double start = 0.0;
  double length = 1.0;
  PulseShape shape = PulseShape::top_hat;

  double operator()(double t) const {
    return amplitude == 0.0 ? 0.0 : amplitude * shape_value(shape, (t - start) / length);
  }
};

SampledTrajectory integrate(const PulseSequence& seq, const std::vector<Span>& spans,
                            Branch branch, double recoil, const GravityEnv& env,
                            const InitialConditions& ics, const OracleConfig& cfg) {
  SampledTrajectory out;
  out.impulse_rel_error.assign(seq.pulses.size(), 0.0);
  if (spans.empty()) return out;

  // The free trajectory solves z̈ = −g − Γz, so the deviation w = z − z_free
  // obeys ẅ = −Γw + a and starts at rest.
  const int N = cfg.steps_per_segment;
  const double G = env.gradient;
  State y{0.0, 0.0, 0.0};

  for (const Span& span : spans) {
    Forcing a;
    a.start = span.a;
    a.length = span.b - span.a;
    a.shape = cfg.shape;
    if (span.pulse >= 0) {
      const double k = seq.pulses[static_cast<std::size_t>(span.pulse)].k(branch);
      a.amplitude = recoil * k / a.length;
    }

    SampledInterval iv;
    iv.t_start = span.a;
    iv.t_end = span.b;
    iv.pulse = span.pulse;
    const auto record = [&](double t) {
      const State f = free_state(env, ics, t);
      iv.t.push_back(t);
      iv.z.push_back(f.z + y.z);
      iv.v.push_back(f.v + y.v);
      iv.z_dev.push_back(y.z);
      iv.v_dev.push_back(y.v);
    };
    for (auto* vec : {&iv.t, &iv.z, &iv.v, &iv.z_dev, &iv.v_dev}) {
      vec->reserve(static_cast<std::size_t>(N) + 1);
    }
    record(span.a);

    const double p_start = y.p;
    const auto deriv = [&](double t, const State& s) {
      const double acc = a(t);
      return State{s.v, -G * s.z + acc, acc};
    };
    double t = span.a;
    for (int i = 1; i <= N; ++i) {
      const double t_next = i == N ? span.b : span.a + (span.b - span.a) * i / N;
      const double h = t_next - t;
      const State k1 = deriv(t, y);
      const State y2{y.z + 0.5 * h * k1.z, y.v + 0.5 * h * k1.v, y.p + 0.5 * h * k1.p};
      const State k2 = deriv(t + 0.5 * h, y2);
      const State y3{y.z + 0.5 * h * k2.z, y.v + 0.5 * h * k2.v, y.p + 0.5 * h * k2.p};
      const State k3 = deriv(t + 0.5 * h, y3);
      const State y4{y.z + h * k3.z, y.v + h * k3.v, y.p + h * k3.p};
      const State k4 = deriv(t_next, y4);
      y.z += h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
      y.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
      y.p += h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
      t = t_next;
      record(t);
    }

    if (span.pulse >= 0 && a.amplitude != 0.0) {
      const double expected = a.amplitude * a.length;
      const double err = std::abs((y.p - p_start) - expected) / std::abs(expected);
      out.impulse_rel_error[static_cast<std::size_t>(span.pulse)] = err;
      if (!(err <= kImpulseRelTol)) {
        throw NumericFailure(fmt::format(
            "step too coarse: impulse of pulse {} off by {:.3e} relative", span.pulse, err));
      }
    }
    out.intervals.push_back(std::move(iv));
  }
  return out;
}

// Composite Simpson over one interval sampled at N + 1 uniform nodes.
template <class F>
double simpson(const SampledInterval& iv, F&& f) {
  const std::size_t n = iv.t.size() - 1;
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < n; ++i) (i % 2 ? odd : even) += f(i);
  const double h = (iv.t_end - iv.t_start) / static_cast<double>(n);
  return h / 3.0 * (f(0) + f(n) + 4.0 * odd + 2.0 * even);
}

struct Quadratures {
  double proper_time = 0.0;      // ∫ f dt, m²/s
  double proper_time_abs = 0.0;  // ∫ |f| dt
  double em = 0.0;               // ∫ (κ¹z¹ − κ²z²) dt
  double gk = 0.0;               // ∫ (κ¹ − κ²) z_free dt
  double max_impulse_error = 0.0;
  double end_dz = 0.0;
  double end_dv = 0.0;
};

Quadratures evaluate(const PulseSequence& seq, const Species& species,
                     const GravityEnv& env, const InitialConditions& ics,
                     const OracleConfig& cfg, const PhysicalConstants& pc) {
  require_well_formed(seq);
  validate_config(seq, cfg);
  const double recoil = pc.hbar / species.mass();
  const auto spans = integration_spans(seq, cfg.pulse_width);
  const SampledTrajectory up = integrate(seq, spans, Branch::upper, recoil, env, ics, cfg);
  const SampledTrajectory lo = integrate(seq, spans, Branch::lower, recoil, env, ics, cfg);

  Quadratures q;
  const double g = env.g;
  const double G = env.gradient;
  for (std::size_t j = 0; j < spans.size(); ++j) {
    const SampledInterval& a = up.intervals[j];
    const SampledInterval& b = lo.intervals[j];
    // branch differences are taken on the deviations, where they are exact
    const auto f = [&](std::size_t i) {
      const double dz = a.z_dev[i] - b.z_dev[i];
      return -0.5 * (a.v_dev[i] - b.v_dev[i]) * (a.v[i] + b.v[i]) + g * dz +
             0.5 * G * dz * (a.z[i] + b.z[i]);
    };
    q.proper_time += simpson(a, f);
    q.proper_time_abs += simpson(a, [&](std::size_t i) { return std::abs(f(i)); });

    if (a.pulse >= 0) {
      const Pulse& p = seq.pulses[static_cast<std::size_t>(a.pulse)];
      const double len = a.t_end - a.t_start;
      const auto density = [&](std::size_t i) {
        return shape_value(cfg.shape, (a.t[i] - a.t_start) / len) / len;
      };
      const auto z_free = [&](std::size_t i) { return free_state(env, ics, a.t[i]).z; };
      q.em += simpson(a, [&](std::size_t i) {
        return density(i) * ((p.k_upper - p.k_lower) * z_free(i) + p.k_upper * a.z_dev[i] -
                             p.k_lower * b.z_dev[i]);
      });
      q.gk += simpson(a, [&](std::size_t i) {
        return density(i) * (p.k_upper - p.k_lower) * z_free(i);
      });
    }
  }
  for (const auto* traj : {&up, &lo}) {
    for (const double e : traj->impulse_rel_error) {
      q.max_impulse_error = std::max(q.max_impulse_error, e);
    }
  }
  if (!spans.empty()) {
    const SampledInterval& a = up.intervals.back();
    const SampledInterval& b = lo.intervals.back();
    q.end_dz = a.z_dev.back() - b.z_dev.back();
    q.end_dv = a.v_dev.back() - b.v_dev.back();
  }
  return q;
}

double max_abs_k(const PulseSequence& seq) {
  double k = 0.0;
  for (const Pulse& p : seq.pulses) k = std::max({k, std::abs(p.k_upper), std::abs(p.k_lower)});
  return k;
}

double time_span(const PulseSequence& seq) {
  return seq.pulses.empty() ? 0.0 : seq.pulses.back().t - seq.pulses.front().t;
}

double relative_to(double value, double target, double zero_scale) {
  const double scale = target != 0.0 ? std::abs(target) : zero_scale;
  const double diff = std::abs(value - target);
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace

const char* to_string(PulseShape shape) noexcept {
  return shape == PulseShape::top_hat ? "tophat" : "cosine";
}

double min_pulse_spacing(const PulseSequence& seq) {
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < seq.pulses.size(); ++i) {
    spacing = std::min(spacing, seq.pulses[i].t - seq.pulses[i - 1].t);
  }
  return spacing;
}

void validate_config(const PulseSequence& seq, const OracleConfig& cfg) {
  const double sigma = cfg.pulse_width;
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw OracleConfigError(fmt::format("pulse width must be positive, got {}", sigma));
  }
  const double spacing = min_pulse_spacing(seq);
  if (!(sigma < 0.5 * spacing)) {
    throw OracleConfigError(fmt::format(
        "pulse width {} must be below half the minimum pulse spacing {}", sigma, spacing));
  }
  if (cfg.steps_per_segment < 100 || cfg.steps_per_segment % 2 != 0) {
    throw OracleConfigError(fmt::format(
        "steps per segment must be even and at least 100, got {}", cfg.steps_per_segment));
  }
}

SampledTrajectory integrate_branch(const PulseSequence& seq, Branch branch,
                                   const Species& species, const GravityEnv& env,
                                   const InitialConditions& ics, const OracleConfig& cfg,
                                   const PhysicalConstants& pc) {
  require_well_formed(seq);
  validate_config(seq, cfg);
  return integrate(seq, integration_spans(seq, cfg.pulse_width), branch,
                   pc.hbar / species.mass(), env, ics, cfg);
}

double zero_target_delta_tau_scale(const PulseSequence& seq, const Species& species,
                                   const PhysicalConstants& pc) {
  const double v = pc.hbar * max_abs_k(seq) / (species.mass() * pc.c);
  return v * v * time_span(seq);
}

double zero_target_phase_scale(const PulseSequence& seq, const Species& species,
                               const PhysicalConstants& pc) {
  const double k = max_abs_k(seq);
  return pc.hbar * k * k * time_span(seq) / species.mass();
}

double proper_time_numeric(const PulseSequence& seq, const Species& species,
                           const GravityEnv& env, const InitialConditions& ics,
                           const OracleConfig& cfg, const PhysicalConstants& pc) {
  require_closed(seq);
  return evaluate(seq, species, env, ics, cfg, pc).proper_time / (pc.c * pc.c);
}

OracleResult run_oracle(const PulseSequence& seq, const Species& species,
                        const GravityEnv& env, const InitialConditions& ics,
                        const OracleConfig& cfg, const PhysicalConstants& pc) {
  require_closed(seq);
  const Quadratures q = evaluate(seq, species, env, ics, cfg, pc);
  OracleConfig fine = cfg;
  fine.steps_per_segment = 2 * cfg.steps_per_segment;
  const Quadratures q2 = evaluate(seq, species, env, ics, fine, pc);

  const double c2 = pc.c * pc.c;
  const double laser = laser_phase(seq);
  OracleResult r;
  r.sigma = cfg.pulse_width;
  r.steps = cfg.steps_per_segment;
  r.shape = cfg.shape;
  r.delta_tau_numeric = q.proper_time / c2;
  r.quadrature_tolerance =
      std::abs(q.proper_time - q2.proper_time) / c2 + 1e-12 * q.proper_time_abs / c2;
  r.recoil_phase_numeric = species.mass() / pc.hbar * q.proper_time;
  r.em_action_numeric = q.em + laser;
  r.gravito_recoil_numeric = q.gk;
  r.total_phase_numeric = -r.recoil_phase_numeric + r.em_action_numeric;
  r.decomposition_residual =
      r.em_action_numeric - 2.0 * r.recoil_phase_numeric - r.gravito_recoil_numeric - laser;
  r.max_impulse_error = std::max(q.max_impulse_error, q2.max_impulse_error);
  r.closure_delta_z = q.end_dz;
  r.closure_delta_v = q.end_dv;

  if (env.gradient == 0.0) {
    const PhaseBreakdown b = total_phase(seq, species, env, ics, pc);
    const double tau_scale = zero_target_delta_tau_scale(seq, species, pc);
    const double phase_scale = zero_target_phase_scale(seq, species, pc);
    r.delta_tau_closed = b.delta_tau;
    r.gravito_recoil_closed = b.gravito_recoil;
    r.total_phase_closed = b.total_phase;
    r.rel_residual = relative_to(r.delta_tau_numeric, b.delta_tau, tau_scale);
    r.gravito_rel_residual =
        relative_to(r.gravito_recoil_numeric, b.gravito_recoil, phase_scale);
    r.total_rel_residual = relative_to(r.total_phase_numeric, b.total_phase, phase_scale);
  }
  return r;
}

ConvergenceStudy convergence_study(const PulseSequence& seq, const Species& species,
                                   const GravityEnv& env, const InitialConditions& ics,
                                   const std::vector<double>& widths,
                                   int steps_per_segment, PulseShape shape, bool parallel,
                                   const PhysicalConstants& pc) {
  if (env.gradient != 0.0) {
    throw UnsupportedPotential(
        "convergence study compares with the closed form, valid only for linear potential");
  }
  if (widths.empty()) throw OracleConfigError("convergence study needs at least one width");
  for (std::size_t i = 1; i < widths.size(); ++i) {
    if (!(widths[i] < widths[i - 1])) {
      throw OracleConfigError(fmt::format(
          "pulse widths must be strictly decreasing ({} follows {})", widths[i],
          widths[i - 1]));
    }
  }
  for (const double w : widths) {
    validate_config(seq, OracleConfig{w, steps_per_segment, shape});
  }

  const auto run = [&](double w) {
    return run_oracle(seq, species, env, ics, OracleConfig{w, steps_per_segment, shape}, pc);
  };
  std::vector<OracleResult> results;
  if (parallel) {
    std::vector<std::future<OracleResult>> jobs;
    for (const double w : widths) jobs.push_back(std::async(std::launch::async, run, w));
    for (auto& j : jobs) results.push_back(j.get());
  } else {
    for (const double w : widths) results.push_back(run(w));
  }

  ConvergenceStudy study;
  const double tau_scale = zero_target_delta_tau_scale(seq, species, pc);
  for (const OracleResult& r : results) {
    const double scale = *r.delta_tau_closed != 0.0 ? std::abs(*r.delta_tau_closed) : tau_scale;
    study.points.push_back({r.sigma, *r.rel_residual, r.quadrature_tolerance / scale, r});
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < study.points.size(); ++i) {
    const ConvergencePoint& p = study.points[i];
    const bool above_floor = p.rel_residual > p.floor;
    if (i > 0 && above_floor && !(p.rel_residual < study.points[i - 1].rel_residual)) {
      study.monotone = false;
    }
    if (above_floor) {
      const double x = std::log(p.sigma);
      const double y = std::log(p.rel_residual);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
  }
  study.exponent = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx)
                          : std::numeric_limits<double>::quiet_NaN();
  return study;
}

}  // namespace qtwin
