#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qtwin/clock_interference.hpp"
#include "qtwin/geometry.hpp"
#include "qtwin/numeric_oracle.hpp"
#include "qtwin/types.hpp"

namespace qtwin {

using Json = nlohmann::ordered_json;

/// Scientific notation with 17 significant digits (round-trips a double).
std::string format_number(double x);

/// Named values in output order.
using Fields = std::vector<std::pair<std::string, Json>>;

Fields fields_of(const PhaseBreakdown& b);
Fields fields_of(const BeatSignal& s);
Fields fields_of(const ClosureReport& r);
Fields fields_of(const OracleResult& r);

Json to_json(const Fields& fields);

/// Two aligned columns, one field per line; doubles in full precision.
std::string text_table(const Fields& fields);

/// Comma-joined header line and value line for one record.
std::string csv_header(const Fields& fields);
std::string csv_row(const Fields& fields);

/// Record of how an output was produced; embedded in every output.
struct RunManifest {
  std::string command;
  Fields parameters;  // resolved, SI units
  std::string tool_version;
  std::string format;
  bool deterministic = true;
  std::string stamp;  // empty unless requested

  Json to_json() const;
  /// "# key: value" lines.
  std::string comment_header() const;
};

}  // namespace qtwin
