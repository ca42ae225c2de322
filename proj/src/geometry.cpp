#include "qtwin/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "qtwin/errors.hpp"
#include "qtwin/exact_sum.hpp"

namespace qtwin {

namespace {

void check_wave_number(double k) {
  if (!std::isfinite(k) || k == 0.0) {
    throw InvalidArgument(fmt::format("wave number must be finite and nonzero, got {}", k));
  }
}

void check_positive_time(double T, const char* what) {
  if (!std::isfinite(T) || T <= 0.0) {
    throw InvalidArgument(fmt::format("{} must be positive, got {}", what, T));
  }
}

void check_pause(double Tp) {
  if (!std::isfinite(Tp) || Tp < 0.0) {
    throw InvalidArgument(fmt::format("pause T' must be non-negative, got {}", Tp));
  }
}

// Power of two q such that every multiple of q up to 2·horizon is exact.
double grid_quantum(double horizon) {
  int e = 0;
  std::frexp(horizon, &e);
  return std::ldexp(1.0, e - 52);
}

double snap(double x, double quantum) { return std::nearbyint(x / quantum) * quantum; }

// Four-pulse RBI layout shared by the symmetric and asymmetric builders.
// The grid depends on T alone for pauses up to T.
PulseSequence build_rbi(const char* name, double T, double Tp, double ku1, double ku2,
                        double ku3, double ku4, double kl1, double kl2, double kl3,
                        double kl4) {
  const double q = grid_quantum(2.0 * T + std::max(Tp, T));
  const double Ts = snap(T, q);
  const double Tps = snap(Tp, q);

  PulseSequence seq;
  seq.name = name;
  seq.pulses.push_back({0.0, ku1, kl1});
  if (Tps == 0.0) {
    seq.pulses.push_back({Ts, ku2 + ku3, kl2 + kl3});
  } else {
    seq.pulses.push_back({Ts, ku2, kl2});
    seq.pulses.push_back({Ts + Tps, ku3, kl3});
  }
  seq.pulses.push_back({2.0 * Ts + Tps, ku4, kl4});
  seq.t_end = seq.pulses.back().t;
  return seq;
}

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

double parse_number(const Token& tok, std::size_t line_no) {
  std::string_view s = tok.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value,
                                         std::chars_format::general);
  if (ec == std::errc::result_out_of_range) {
    throw GeometryParseError(ParseErrorKind::non_finite, line_no, tok.column,
                             fmt::format("'{}' overflows a double", tok.text));
  }
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw GeometryParseError(ParseErrorKind::syntax, line_no, tok.column,
                             fmt::format("expected a number, got '{}'", tok.text));
  }
  if (!std::isfinite(value)) {
    throw GeometryParseError(ParseErrorKind::non_finite, line_no, tok.column,
                             fmt::format("'{}' is not finite", tok.text));
  }
  return value;
}

void expect_arity(const std::vector<Token>& toks, std::size_t line_no,
                  std::initializer_list<std::size_t> allowed) {
  const std::size_t n = toks.size() - 1;
  if (std::find(allowed.begin(), allowed.end(), n) != allowed.end()) return;
  const std::size_t most = std::max(allowed);
  // point at the first surplus token, or just past the end of the line
  const std::size_t column = n > most ? toks[most + 1].column
                                      : toks.back().column + toks.back().text.size();
  throw GeometryParseError(ParseErrorKind::syntax, line_no, column,
                           fmt::format("'{}' takes {} argument(s), got {}", toks[0].text,
                                       fmt::join(allowed, " or "), n));
}

bool is_positive_zero(double x) { return x == 0.0 && !std::signbit(x); }

std::string format_number(double x) { return fmt::format("{:.16e}", x); }

}  // namespace

PulseSequence build_mzi(double k, double T) {
  check_wave_number(k);
  check_positive_time(T, "T");
  PulseSequence seq;
  seq.name = "mzi";
  seq.pulses = {{0.0, k, 0.0}, {T, -k, k}, {2.0 * T, 0.0, -k}};
  seq.t_end = 2.0 * T;
  return seq;
}

PulseSequence build_rbi_symmetric(double k, double T, double Tp) {
  check_wave_number(k);
  check_positive_time(T, "T");
  check_pause(Tp);
  return build_rbi("rbi-sym", T, Tp, k, -k, 0.0, 0.0, 0.0, 0.0, k, -k);
}

PulseSequence build_rbi_asymmetric(double k, double T, double Tp) {
  check_wave_number(k);
  check_positive_time(T, "T");
  check_pause(Tp);
  return build_rbi("rbi-asym", T, Tp, k, -k, -k, k, 0.0, 0.0, 0.0, 0.0);
}

PulseSequence build_rbi_double_loop(double k, double T) {
  check_wave_number(k);
  check_positive_time(T, "T");
  const double Ts = snap(T, grid_quantum(4.0 * T));
  PulseSequence seq;
  seq.name = "rbi-double";
  seq.pulses = {{0.0, k, 0.0},
                {Ts, -2.0 * k, 0.0},
                {3.0 * Ts, 2.0 * k, 0.0},
                {4.0 * Ts, -k, 0.0}};
  seq.t_end = 4.0 * Ts;
  return seq;
}

ClosureReport closure_check(const PulseSequence& seq, const Species& species,
                            const PhysicalConstants& pc) {
  ExactSum m0, m1, m2, lever;
  double kmax = 0.0;
  double tkmax = 0.0;
  for (const Pulse& p : seq.pulses) {
    m0.add(p.k_upper);
    m0.add(-p.k_lower);
    m1.add_product(p.t, p.k_upper);
    m1.add_product(p.t, -p.k_lower);
    m2.add_product(p.t, p.t, p.k_upper);
    m2.add_product(p.t, p.t, -p.k_lower);
    // Σ (t_end − t_ℓ) Δk_ℓ
    lever.add_product(seq.t_end, p.k_upper);
    lever.add_product(seq.t_end, -p.k_lower);
    lever.add_product(-p.t, p.k_upper);
    lever.add_product(p.t, p.k_lower);
    kmax = std::max({kmax, std::abs(p.k_upper), std::abs(p.k_lower)});
    tkmax = std::max({tkmax, std::abs(p.t * p.k_upper), std::abs(p.t * p.k_lower)});
  }
  ClosureReport r;
  r.moment0 = m0.value();
  r.moment1 = m1.value();
  r.moment2 = m2.value();
  r.tol0 = kClosureRelTol * kmax;
  r.tol1 = kClosureRelTol * tkmax;
  const double recoil = pc.hbar / species.mass();
  r.delta_v_final = recoil * r.moment0;
  r.delta_z_final = recoil * lever.value();
  r.closed = std::abs(r.moment0) <= r.tol0 && std::abs(r.moment1) <= r.tol1;
  return r;
}

PulseSequence parse_geometry(std::string_view text) {
  PulseSequence seq;
  std::optional<double> tend;
  std::size_t tend_line = 0;
  std::size_t tend_column = 0;
  bool have_name = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto toks = tokenize(line);
    if (toks.empty()) continue;

    const std::string_view directive = toks[0].text;
    if (directive == "name") {
      expect_arity(toks, line_no, {1});
      if (have_name) {
        throw GeometryParseError(ParseErrorKind::duplicate_directive, line_no,
                                 toks[0].column, "'name' given twice");
      }
      have_name = true;
      seq.name = std::string(toks[1].text);
    } else if (directive == "tend") {
      expect_arity(toks, line_no, {1});
      if (tend) {
        throw GeometryParseError(ParseErrorKind::duplicate_directive, line_no,
                                 toks[0].column, "'tend' given twice");
      }
      tend = parse_number(toks[1], line_no);
      tend_line = line_no;
      tend_column = toks[1].column;
    } else if (directive == "pulse") {
      expect_arity(toks, line_no, {3, 5});
      Pulse p;
      p.t = parse_number(toks[1], line_no);
      p.k_upper = parse_number(toks[2], line_no);
      p.k_lower = parse_number(toks[3], line_no);
      if (toks.size() == 6) {
        p.phi_upper = parse_number(toks[4], line_no);
        p.phi_lower = parse_number(toks[5], line_no);
      }
      if (!seq.pulses.empty() && !(seq.pulses.back().t < p.t)) {
        throw GeometryParseError(
            ParseErrorKind::non_monotone_times, line_no, toks[1].column,
            fmt::format("pulse at t = {} does not follow t = {}", p.t,
                        seq.pulses.back().t));
      }
      seq.pulses.push_back(p);
    } else {
      throw GeometryParseError(ParseErrorKind::syntax, line_no, toks[0].column,
                               fmt::format("unknown directive '{}'", directive));
    }
  }

  const double last = seq.pulses.empty() ? 0.0 : seq.pulses.back().t;
  if (tend) {
    if (*tend < last) {
      throw GeometryParseError(
          ParseErrorKind::invalid_duration, tend_line, tend_column,
          fmt::format("tend {} precedes the last pulse at {}", *tend, last));
    }
    seq.t_end = *tend;
  } else {
    seq.t_end = last;
  }
  return seq;
}

std::string serialize_geometry(const PulseSequence& seq) {
  if (seq.name.find_first_of(" \t\r\n\v\f#") != std::string::npos) {
    throw InvalidArgument(fmt::format("sequence name '{}' is not a single token", seq.name));
  }
  const bool with_phases =
      std::any_of(seq.pulses.begin(), seq.pulses.end(), [](const Pulse& p) {
        return !is_positive_zero(p.phi_upper) || !is_positive_zero(p.phi_lower);
      });

  std::vector<Pulse> pulses = seq.pulses;
  std::stable_sort(pulses.begin(), pulses.end(),
                   [](const Pulse& a, const Pulse& b) { return a.t < b.t; });

  std::string out;
  if (!seq.name.empty()) out += fmt::format("name {}\n", seq.name);
  out += fmt::format("tend {}\n", format_number(seq.t_end));
  for (const Pulse& p : pulses) {
    out += fmt::format("pulse {} {} {}", format_number(p.t), format_number(p.k_upper),
                       format_number(p.k_lower));
    if (with_phases) {
      out += fmt::format(" {} {}", format_number(p.phi_upper), format_number(p.phi_lower));
    }
    out += '\n';
  }
  return out;
}

}  // namespace qtwin
