#include "qtwin/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "qtwin/errors.hpp"

namespace qtwin {

const char* to_string(ParseErrorKind kind) noexcept {
  switch (kind) {
    case ParseErrorKind::syntax: return "syntax error";
    case ParseErrorKind::non_monotone_times: return "non-monotone times";
    case ParseErrorKind::non_finite: return "non-finite number";
    case ParseErrorKind::duplicate_directive: return "duplicate directive";
    case ParseErrorKind::invalid_duration: return "invalid duration";
  }
  return "unknown";
}

GeometryParseError::GeometryParseError(ParseErrorKind kind, std::size_t line,
                                       std::size_t column,
                                       const std::string& detail)
    : Error(fmt::format("{}:{}: {}: {}", line, column, to_string(kind), detail)),
      kind_(kind),
      line_(line),
      column_(column) {}

const char* to_string(ViolationRule rule) noexcept {
  switch (rule) {
    case ViolationRule::non_finite_field: return "non-finite field";
    case ViolationRule::non_monotone_times: return "non-monotone times";
    case ViolationRule::non_finite_duration: return "non-finite duration";
    case ViolationRule::end_before_last_pulse: return "end before last pulse";
    case ViolationRule::too_few_pulses: return "too few pulses";
  }
  return "unknown";
}

Species::Species(double mass, std::string label)
    : mass_(mass), label_(std::move(label)) {
  if (!std::isfinite(mass) || mass <= 0.0) {
    throw InvalidArgument(fmt::format("mass must be positive, got {}", mass));
  }
}

ClockPair::ClockPair(double mean_mass, double splitting_omega,
                     const PhysicalConstants& pc)
    : mean_mass_(mean_mass), omega_(splitting_omega) {
  if (!std::isfinite(mean_mass) || mean_mass <= 0.0) {
    throw InvalidArgument(fmt::format("mean mass must be positive, got {}", mean_mass));
  }
  if (!std::isfinite(splitting_omega) || splitting_omega < 0.0) {
    throw InvalidArgument(
        fmt::format("splitting frequency must be non-negative, got {}", splitting_omega));
  }
  delta_m_ = pc.hbar * splitting_omega / (pc.c * pc.c);
  if (!(delta_m_ < 2.0 * mean_mass)) {
    throw InvalidArgument("mass splitting must be smaller than twice the mean mass");
  }
  const double x = delta_m_ / (2.0 * mean_mass);
  eta_ = 1.0 / (1.0 - x * x);
}

ClockPair ClockPair::from_mass_ratio(double mean_mass, double ratio,
                                     const PhysicalConstants& pc) {
  return ClockPair(mean_mass, ratio * mean_mass * pc.c * pc.c / pc.hbar, pc);
}

std::vector<Violation> validate_sequence(const PulseSequence& seq) {
  std::vector<Violation> out;
  if (seq.pulses.size() < 2) {
    out.push_back({std::nullopt, ViolationRule::too_few_pulses,
                   fmt::format("{} pulse(s); an interferometer needs at least 2",
                               seq.pulses.size())});
  }
  if (!std::isfinite(seq.t_end)) {
    out.push_back({std::nullopt, ViolationRule::non_finite_duration,
                   "t_end is not finite"});
  } else if (!seq.pulses.empty() && std::isfinite(seq.pulses.back().t) &&
             seq.t_end < seq.pulses.back().t) {
    out.push_back({std::nullopt, ViolationRule::end_before_last_pulse,
                   fmt::format("t_end {} precedes last pulse at {}", seq.t_end,
                               seq.pulses.back().t)});
  }
  for (std::size_t i = 0; i < seq.pulses.size(); ++i) {
    const Pulse& p = seq.pulses[i];
    const bool finite = std::isfinite(p.t) && std::isfinite(p.k_upper) &&
                        std::isfinite(p.k_lower) && std::isfinite(p.phi_upper) &&
                        std::isfinite(p.phi_lower);
    if (!finite) {
      out.push_back({i, ViolationRule::non_finite_field,
                     fmt::format("pulse {}: non-finite field", i)});
    }
    if (i > 0 && !(seq.pulses[i - 1].t < p.t) && std::isfinite(p.t) &&
        std::isfinite(seq.pulses[i - 1].t)) {
      out.push_back({i, ViolationRule::non_monotone_times,
                     fmt::format("pulse {}: non-monotone times ({} after {})", i, p.t,
                                 seq.pulses[i - 1].t)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    const auto key = [](const Violation& v) {
      return std::pair(v.pulse_index ? *v.pulse_index + 1 : 0,
                       static_cast<int>(v.rule));
    };
    return key(a) < key(b);
  });
  return out;
}

namespace {

void throw_violations(const std::vector<Violation>& report) {
  if (report.empty()) return;
  std::ostringstream msg;
  msg << "invalid pulse sequence:";
  for (const auto& v : report) msg << "\n  " << v.message;
  throw InvalidSequence(msg.str());
}

}  // namespace

void require_valid(const PulseSequence& seq) { throw_violations(validate_sequence(seq)); }

void require_well_formed(const PulseSequence& seq) {
  auto report = validate_sequence(seq);
  std::erase_if(report, [](const Violation& v) {
    return v.rule == ViolationRule::too_few_pulses;
  });
  throw_violations(report);
}

double compton_frequency(const Species& species, const PhysicalConstants& pc) {
  return species.mass() * pc.c * pc.c / pc.hbar;
}

PulseSequence swap_branches(PulseSequence seq) {
  for (auto& p : seq.pulses) {
    std::swap(p.k_upper, p.k_lower);
    std::swap(p.phi_upper, p.phi_lower);
  }
  return seq;
}

}  // namespace qtwin
