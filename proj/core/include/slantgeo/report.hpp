#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slantgeo/theorems.hpp"

namespace slantgeo {

struct RunReport {
  std::string scenario;
  std::string digest;
  std::string tool = "slantgeo";
  std::string version;
  std::string side;
  std::uint64_t seed = 0;
  std::vector<PointSummary> points;
  std::vector<SkippedPoint> skipped_points;
  std::vector<CheckReport> checks;
  std::vector<PaperNote> paper_notes;
  std::string status;  // pass | fail | degenerate
  int exit_code = 0;
  std::optional<double> wall_time_s;
};

// Single JSON document with sorted keys; non-finite numbers are written as null.
std::string to_json(const RunReport& report);
// Inverse of to_json; throws InputError on malformed documents.
RunReport report_from_json(std::string_view text);
// JSON Schema of the report document.
std::string report_schema();

const char* library_version();

}  // namespace slantgeo
