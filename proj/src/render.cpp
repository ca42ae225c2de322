#include "qtwin/render.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace qtwin {

namespace {

Json optional_number(const std::optional<double>& x) {
  return x ? Json(*x) : Json(nullptr);
}

std::string scalar_text(const Json& v) {
  if (v.is_null()) return "null";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_number(v.get<double>());
  return v.dump();
}

}  // namespace

std::string format_number(double x) { return fmt::format("{:.16e}", x); }

Fields fields_of(const PhaseBreakdown& b) {
  return {{"delta_tau", b.delta_tau},
          {"recoil_phase", b.recoil_phase},
          {"gravito_recoil", b.gravito_recoil},
          {"laser_phase", b.laser_phase},
          {"total_phase", b.total_phase}};
}

Fields fields_of(const BeatSignal& s) {
  return {{"p_a", s.p_a},
          {"p_b", s.p_b},
          {"p_combined", s.p_combined},
          {"p_closed_form", s.p_closed_form},
          {"envelope", s.envelope},
          {"carrier_phase", s.carrier_phase},
          {"delta_tau", s.delta_tau},
          {"eta", s.eta}};
}

Fields fields_of(const ClosureReport& r) {
  return {{"closed", r.closed},
          {"delta_z_final", r.delta_z_final},
          {"delta_v_final", r.delta_v_final},
          {"moment0", r.moment0},
          {"moment1", r.moment1},
          {"moment2", r.moment2},
          {"tol0", r.tol0},
          {"tol1", r.tol1}};
}

Fields fields_of(const OracleResult& r) {
  return {{"sigma", r.sigma},
          {"steps", r.steps},
          {"shape", to_string(r.shape)},
          {"delta_tau_numeric", r.delta_tau_numeric},
          {"delta_tau_closed", optional_number(r.delta_tau_closed)},
          {"rel_residual", optional_number(r.rel_residual)},
          {"quadrature_tolerance", r.quadrature_tolerance},
          {"closure_residuals",
           Json{{"delta_z", r.closure_delta_z}, {"delta_v", r.closure_delta_v}}},
          {"recoil_phase_numeric", r.recoil_phase_numeric},
          {"em_action_numeric", r.em_action_numeric},
          {"gravito_recoil_numeric", r.gravito_recoil_numeric},
          {"gravito_recoil_closed", optional_number(r.gravito_recoil_closed)},
          {"gravito_rel_residual", optional_number(r.gravito_rel_residual)},
          {"total_phase_numeric", r.total_phase_numeric},
          {"total_phase_closed", optional_number(r.total_phase_closed)},
          {"total_rel_residual", optional_number(r.total_rel_residual)},
          {"decomposition_residual", r.decomposition_residual},
          {"max_impulse_error", r.max_impulse_error}};
}

Json to_json(const Fields& fields) {
  Json j = Json::object();
  for (const auto& [key, value] : fields) j[key] = value;
  return j;
}

std::string text_table(const Fields& fields) {
  std::size_t width = 0;
  for (const auto& [key, value] : fields) {
    if (value.is_object()) {
      for (const auto& item : value.items()) {
        width = std::max(width, key.size() + 1 + item.key().size());
      }
    } else {
      width = std::max(width, key.size());
    }
  }
  std::string out;
  for (const auto& [key, value] : fields) {
    if (value.is_object()) {
      for (const auto& [sub, v] : value.items()) {
        out += fmt::format("{:<{}}  {}\n", key + "." + sub, width, scalar_text(v));
      }
    } else {
      out += fmt::format("{:<{}}  {}\n", key, width, scalar_text(value));
    }
  }
  return out;
}

std::string csv_header(const Fields& fields) {
  std::string out;
  for (const auto& [key, value] : fields) {
    if (value.is_object()) {
      for (const auto& item : value.items()) {
        out += (out.empty() ? "" : ",") + key + "." + item.key();
      }
    } else {
      out += (out.empty() ? "" : ",") + key;
    }
  }
  return out + "\n";
}

std::string csv_row(const Fields& fields) {
  std::string out;
  bool first = true;
  const auto put = [&](const Json& v) {
    if (!first) out += ',';
    out += scalar_text(v);
    first = false;
  };
  for (const auto& f : fields) {
    if (f.second.is_object()) {
      for (const auto& item : f.second.items()) put(item.value());
    } else {
      put(f.second);
    }
  }
  return out + "\n";
}

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["parameters"] = qtwin::to_json(parameters);
  j["tool_version"] = tool_version;
  j["format"] = format;
  j["deterministic"] = deterministic;
  if (!stamp.empty()) j["stamp"] = stamp;
  return j;
}

std::string RunManifest::comment_header() const {
  std::string out;
  out += fmt::format("# command: {}\n", command);
  for (const auto& [key, value] : parameters) {
    out += fmt::format("# {}: {}\n", key, scalar_text(value));
  }
  out += fmt::format("# tool_version: {}\n", tool_version);
  out += fmt::format("# format: {}\n", format);
  out += fmt::format("# deterministic: {}\n", deterministic);
  if (!stamp.empty()) out += fmt::format("# stamp: {}\n", stamp);
  return out;
}

}  // namespace qtwin
