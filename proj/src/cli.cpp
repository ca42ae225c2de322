#include "qtwin/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qtwin/clock_interference.hpp"
#include "qtwin/constants.hpp"
#include "qtwin/errors.hpp"
#include "qtwin/geometry.hpp"
#include "qtwin/kinematics.hpp"
#include "qtwin/numeric_oracle.hpp"
#include "qtwin/phase_engine.hpp"
#include "qtwin/render.hpp"

#ifndef QTWIN_VERSION
#define QTWIN_VERSION "0.0.0"
#endif

namespace qtwin::cli {

namespace {

constexpr const char* kToolVersion = "qtwin " QTWIN_VERSION;

struct Options {
  std::string geometry;
  std::optional<double> k;
  std::optional<double> k_in_km;
  std::optional<double> T;
  double Tprime = 0.0;
  double g = 9.81;
  double mass = kStrontium87Mass;
  double z0 = 0.0;
  double v0 = 0.0;
  std::optional<double> omega;
  std::string format = "text";
  std::string out_path;
  bool stamp = false;

  // scan
  std::string vary;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;

  // oracle
  std::optional<double> sigma;
  int oracle_steps = 200;
  std::string shape = "tophat";
  bool sweep_sigma = false;
  double tol = 1e-6;
  double gradient = 0.0;

  // trajectory
  std::optional<double> dt;
};

void add_geometry_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--geometry", o.geometry,
                  "mzi | rbi-sym | rbi-asym | rbi-double | file:<path>")
      ->required();
  auto* k = cmd->add_option("--k", o.k, "wave number transfer k (1/m)");
  auto* km = cmd->add_option("--k-in-km", o.k_in_km, "k as a multiple of k_m = 1.5e7 /m");
  k->excludes(km);
  cmd->add_option("--T", o.T, "pulse separation T (s)");
  cmd->add_option("--Tprime", o.Tprime, "central pause T' of the RBI geometries (s)")
      ->capture_default_str();
  cmd->add_option("--g", o.g, "gravitational acceleration along -z (m/s^2)")
      ->capture_default_str();
  cmd->add_option("--mass", o.mass, "atomic mass (kg)")->capture_default_str();
  cmd->add_option("--z0", o.z0, "initial position (m)")->capture_default_str();
  cmd->add_option("--v0", o.v0, "initial velocity (m/s)")->capture_default_str();
  cmd->add_option("--out", o.out_path, "write the result to this file instead of stdout");
  cmd->add_flag("--stamp", o.stamp, "add a UTC timestamp to the manifest");
}

// The first allowed format is the subcommand's default.
void add_format_option(CLI::App* cmd, Options& o, std::vector<std::string> allowed) {
  const std::string fallback = allowed.front();
  cmd->add_option("--format", o.format, fmt::format("output format (default {})", fallback))
      ->check(CLI::IsMember(std::move(allowed)));
  cmd->parse_complete_callback([cmd, &o, fallback] {
    if (cmd->count("--format") == 0) o.format = fallback;
  });
}

void add_omega_option(CLI::App* cmd, Options& o) {
  cmd->add_option("--omega", o.omega, "clock splitting frequency (rad/s); enables clock mode");
}

std::optional<double> resolved_k(const Options& o) {
  if (o.k_in_km) return *o.k_in_km * kMagicWaveNumber;
  return o.k;
}

bool is_file_geometry(const Options& o) { return o.geometry.rfind("file:", 0) == 0; }

PulseSequence read_geometry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open geometry file '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_geometry(text.str());
}

PulseSequence build(const Options& o, double k, double T) {
  if (o.geometry == "mzi") return build_mzi(k, T);
  if (o.geometry == "rbi-sym") return build_rbi_symmetric(k, T, o.Tprime);
  if (o.geometry == "rbi-asym") return build_rbi_asymmetric(k, T, o.Tprime);
  if (o.geometry == "rbi-double") return build_rbi_double_loop(k, T);
  throw InvalidArgument(fmt::format("unknown geometry '{}'", o.geometry));
}

PulseSequence make_sequence(const Options& o) {
  if (is_file_geometry(o)) return read_geometry_file(o.geometry.substr(5));
  const auto k = resolved_k(o);
  if (!k) throw InvalidArgument("--k or --k-in-km is required for builder geometries");
  if (!o.T) throw InvalidArgument("--T is required for builder geometries");
  return build(o, *k, *o.T);
}

Json number_or_null(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::string utc_stamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest manifest(const std::string& command, const Options& o, Fields extra = {}) {
  RunManifest m;
  m.command = command;
  m.parameters.emplace_back("geometry", o.geometry);
  if (!is_file_geometry(o)) {
    m.parameters.emplace_back("k", number_or_null(resolved_k(o)));
    if (o.k_in_km) m.parameters.emplace_back("k_in_km", *o.k_in_km);
    m.parameters.emplace_back("T", number_or_null(o.T));
    m.parameters.emplace_back("Tprime", o.Tprime);
  }
  m.parameters.emplace_back("g", o.g);
  m.parameters.emplace_back("mass", o.mass);
  m.parameters.emplace_back("z0", o.z0);
  m.parameters.emplace_back("v0", o.v0);
  m.parameters.emplace_back("omega", number_or_null(o.omega));
  for (auto& f : extra) m.parameters.push_back(std::move(f));
  m.tool_version = kToolVersion;
  m.format = o.format;
  m.deterministic = true;
  if (o.stamp) m.stamp = utc_stamp();
  return m;
}

void emit(const Options& o, const std::string& content, std::ostream& out) {
  if (o.out_path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) throw InvalidArgument(fmt::format("cannot write '{}'", o.out_path));
  file << content;
}

std::string render_record(const Options& o, const RunManifest& m,
                          const std::vector<std::pair<std::string, Fields>>& sections) {
  if (o.format == "json") {
    Json j;
    j["manifest"] = m.to_json();
    for (const auto& [name, fields] : sections) j[name] = to_json(fields);
    return j.dump(2) + "\n";
  }
  std::string s = m.comment_header();
  if (o.format == "csv") {
    Fields all;
    for (const auto& [name, fields] : sections) {
      for (const auto& f : fields) {
        const bool seen = std::any_of(all.begin(), all.end(),
                                      [&](const auto& a) { return a.first == f.first; });
        if (!seen) all.push_back(f);
      }
    }
    return s + csv_header(all) + csv_row(all);
  }
  for (const auto& [name, fields] : sections) s += "[" + name + "]\n" + text_table(fields);
  return s;
}

std::string render_rows(const Options& o, const RunManifest& m,
                        const std::vector<Fields>& rows, const Fields& summary = {}) {
  if (o.format == "json") {
    Json j;
    j["manifest"] = m.to_json();
    for (const auto& [key, value] : summary) j[key] = value;
    j["rows"] = Json::array();
    for (const auto& r : rows) j["rows"].push_back(to_json(r));
    return j.dump(2) + "\n";
  }
  std::string s = m.comment_header();
  for (const auto& [key, value] : summary) {
    s += fmt::format("# {}: {}\n", key,
                     value.is_number_float() ? format_number(value.get<double>())
                                             : value.dump());
  }
  if (rows.empty()) return s;
  if (o.format == "csv") {
    s += csv_header(rows.front());
    for (const auto& r : rows) s += csv_row(r);
    return s;
  }
  // aligned columns
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header;
  for (const auto& f : rows.front()) header.push_back(f.first);
  cells.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line;
    for (const auto& f : r) {
      line.push_back(f.second.is_number_float() ? format_number(f.second.get<double>())
                                                : f.second.dump());
    }
    cells.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  for (const auto& line : cells) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      text += fmt::format("{:>{}}", line[i], width[i]) + (i + 1 < line.size() ? "  " : "");
    }
    s += text + "\n";
  }
  return s;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const PulseSequence seq = make_sequence(o);
  const Species species(o.mass);
  const GravityEnv env{o.g, 0.0};
  const InitialConditions ics{o.z0, o.v0};
  std::vector<std::pair<std::string, Fields>> sections;
  sections.emplace_back("phase", fields_of(total_phase(seq, species, env, ics)));
  if (o.omega) {
    const ClockPair clock(o.mass, *o.omega);
    sections.emplace_back("beat", fields_of(beat(seq, clock, env, ics)));
  }
  emit(o, render_record(o, manifest("simulate", o), sections), out);
  return kOk;
}

int cmd_scan(const Options& o, std::ostream& out) {
  if (is_file_geometry(o)) throw InvalidArgument("scan needs a builder geometry");
  if (o.vary != "T" && o.vary != "k") {
    throw InvalidArgument(fmt::format("--vary must be T or k, got '{}'", o.vary));
  }
  if (o.steps < 1 || !std::isfinite(o.from) || !std::isfinite(o.to) || !(o.to >= o.from)) {
    throw InvalidArgument(fmt::format("empty scan range: from {} to {} in {} step(s)", o.from,
                                      o.to, o.steps));
  }
  const bool vary_T = o.vary == "T";
  const auto k = resolved_k(o);
  if (vary_T && !k) throw InvalidArgument("--k or --k-in-km is required when scanning T");
  if (!vary_T && !o.T) throw InvalidArgument("--T is required when scanning k");

  const Species species(o.mass);
  const GravityEnv env{o.g, 0.0};
  const InitialConditions ics{o.z0, o.v0};
  std::optional<ClockPair> clock;
  if (o.omega) clock.emplace(o.mass, *o.omega);

  std::vector<Fields> rows;
  for (int i = 0; i < o.steps; ++i) {
    const double x = o.steps == 1   ? o.from
                     : i + 1 == o.steps ? o.to
                                        : o.from + (o.to - o.from) * i / (o.steps - 1);
    Fields row{{o.vary, x}};
    // a zero scanned value is the limit of a vanishing interferometer
    const bool limit = x == 0.0;
    if (clock) {
      BeatSignal b;
      if (!limit) {
        b = beat(vary_T ? build(o, *k, x) : build(o, x, *o.T), *clock, env, ics);
      }
      row.emplace_back("delta_tau", b.delta_tau);
      row.emplace_back("envelope", b.envelope);
      row.emplace_back("carrier_phase", b.carrier_phase);
      row.emplace_back("P", b.p_combined);
    } else {
      PhaseBreakdown b;
      if (!limit) {
        b = total_phase(vary_T ? build(o, *k, x) : build(o, x, *o.T), species, env, ics);
      }
      for (auto& f : fields_of(b)) row.push_back(std::move(f));
    }
    rows.push_back(std::move(row));
  }
  const RunManifest m = manifest(
      "scan", o, {{"vary", o.vary}, {"from", o.from}, {"to", o.to}, {"steps", o.steps}});
  emit(o, render_rows(o, m, rows), out);
  return kOk;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  const PulseSequence seq = make_sequence(o);
  const ClosureReport report = closure_check(seq, Species(o.mass));
  const auto violations = validate_sequence(seq);

  Fields closure = fields_of(report);
  closure.insert(closure.begin(), {"name", seq.name});
  closure.insert(closure.begin() + 1, {"pulses", seq.pulses.size()});
  std::string content;
  if (o.format == "json") {
    Json j;
    j["manifest"] = manifest("check", o).to_json();
    j["closure"] = to_json(closure);
    j["violations"] = Json::array();
    for (const auto& v : violations) j["violations"].push_back(v.message);
    content = j.dump(2) + "\n";
  } else {
    content = render_record(o, manifest("check", o), {{"closure", closure}});
    for (const auto& v : violations) content += "# violation: " + v.message + "\n";
  }
  emit(o, content, out);
  if (!report.closed) {
    err << "geometry is open in phase space\n";
    return kOpenGeometry;
  }
  if (!violations.empty()) {
    err << "geometry is closed but violates sequence invariants\n";
    return kUsageError;
  }
  return kOk;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  const PulseSequence seq = make_sequence(o);
  const Species species(o.mass);
  const GravityEnv env{o.g, o.gradient};
  const InitialConditions ics{o.z0, o.v0};
  const PulseShape shape = o.shape == "cosine" ? PulseShape::raised_cosine
                                               : PulseShape::top_hat;
  const double spacing = min_pulse_spacing(seq);
  Fields extra{{"steps", o.oracle_steps},
               {"shape", o.shape},
               {"tol", o.tol},
               {"gradient", o.gradient}};

  if (o.sweep_sigma) {
    std::vector<double> widths;
    for (const double f : {1e-3, 1e-4, 1e-5, 1e-6}) widths.push_back(f * spacing);
    const ConvergenceStudy study =
        convergence_study(seq, species, env, ics, widths, o.oracle_steps, shape);
    std::vector<Fields> rows;
    for (const auto& p : study.points) {
      rows.push_back({{"sigma", p.sigma},
                      {"rel_residual", p.rel_residual},
                      {"floor", p.floor},
                      {"delta_tau_numeric", p.result.delta_tau_numeric}});
    }
    extra.emplace_back("sweep_sigma", true);
    const RunManifest m = manifest("oracle", o, extra);
    emit(o,
         render_rows(o, m, rows,
                     {{"monotone", study.monotone}, {"exponent", study.exponent}}),
         out);
    const double last = study.points.back().rel_residual;
    if (!study.monotone) {
      err << "residuals are not monotone in the pulse width\n";
      return kNumericFailure;
    }
    if (last > o.tol) {
      err << fmt::format("residual {:.3e} exceeds tolerance {:.3e}\n", last, o.tol);
      return kNumericFailure;
    }
    return kOk;
  }

  OracleConfig cfg;
  cfg.pulse_width = o.sigma ? *o.sigma : 1e-6 * spacing;
  cfg.steps_per_segment = o.oracle_steps;
  cfg.shape = shape;
  extra.insert(extra.begin(), {"sigma", cfg.pulse_width});
  const OracleResult r = run_oracle(seq, species, env, ics, cfg);
  emit(o, render_record(o, manifest("oracle", o, extra), {{"oracle", fields_of(r)}}), out);
  if (r.rel_residual && *r.rel_residual > o.tol) {
    err << fmt::format("residual {:.3e} exceeds tolerance {:.3e}\n", *r.rel_residual, o.tol);
    return kNumericFailure;
  }
  return kOk;
}

int cmd_trajectory(const Options& o, std::ostream& out) {
  const PulseSequence seq = make_sequence(o);
  const double dt = o.dt ? *o.dt : seq.t_end / 100.0;
  const std::string csv = trajectory_csv(seq, Species(o.mass), GravityEnv{o.g, 0.0},
                                         InitialConditions{o.z0, o.v0}, dt);
  const RunManifest m = manifest("trajectory", o, {{"dt", dt}});
  emit(o, m.comment_header() + csv, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase decomposition of light-pulse atom interferometers and quantum-clock "
               "interference",
               "qtwin"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Options o;
  auto* simulate = app.add_subcommand("simulate", "phase breakdown (and beat in clock mode)");
  add_geometry_options(simulate, o);
  add_format_option(simulate, o, {"text", "json", "csv"});
  add_omega_option(simulate, o);

  auto* scan = app.add_subcommand("scan", "sweep T or k and tabulate the phases or the beat");
  add_geometry_options(scan, o);
  add_format_option(scan, o, {"csv", "text", "json"});
  add_omega_option(scan, o);
  scan->add_option("--vary", o.vary, "scanned parameter: T or k")
      ->required()
      ->check(CLI::IsMember({"T", "k"}));
  scan->add_option("--from", o.from, "first grid value (SI)")->required();
  scan->add_option("--to", o.to, "last grid value (SI)")->required();
  scan->add_option("--steps", o.steps, "number of grid points")->required();

  auto* check = app.add_subcommand("check", "phase-space closure report");
  add_geometry_options(check, o);
  add_format_option(check, o, {"text", "json", "csv"});

  auto* oracle = app.add_subcommand("oracle", "compare with the finite-pulse numeric oracle");
  add_geometry_options(oracle, o);
  add_format_option(oracle, o, {"json", "text", "csv"});
  oracle->add_option("--sigma", o.sigma, "pulse width (s); default 1e-6 x minimum spacing");
  oracle->add_option("--steps", o.oracle_steps, "RK4 steps per window and per gap")
      ->capture_default_str();
  oracle->add_option("--shape", o.shape, "pulse shape")
      ->check(CLI::IsMember({"tophat", "cosine"}))
      ->capture_default_str();
  oracle->add_flag("--sweep-sigma", o.sweep_sigma,
                   "convergence study over sigma/spacing = 1e-3 ... 1e-6");
  oracle->add_option("--tol", o.tol, "largest accepted relative residual")
      ->capture_default_str();
  oracle->add_option("--gradient", o.gradient,
                     "gravity gradient (1/s^2); exploratory, disables the closed form")
      ->capture_default_str();

  auto* trajectory = app.add_subcommand("trajectory", "branch trajectories as CSV");
  add_geometry_options(trajectory, o);
  add_format_option(trajectory, o, {"csv"});
  trajectory->add_option("--dt", o.dt, "sampling step (s); default t_end/100");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (scan->parsed()) return cmd_scan(o, out);
    if (check->parsed()) return cmd_check(o, out, err);
    if (oracle->parsed()) return cmd_oracle(o, out, err);
    if (trajectory->parsed()) return cmd_trajectory(o, out);
  } catch (const OpenGeometry& e) {
    err << "error: " << e.what() << "\n";
    return kOpenGeometry;
  } catch (const NumericFailure& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace qtwin::cli
