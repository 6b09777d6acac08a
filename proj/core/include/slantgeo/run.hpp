#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slantgeo/report.hpp"
#include "slantgeo/scenario.hpp"

namespace slantgeo {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDegenerate = 3;

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  double tol_scale = 1.0;
  std::vector<std::string> only;  // replaces the scenario's selection when non-empty
  bool timestamp = true;
};

SuiteConfig suite_config(const Scenario& scenario, const RunOptions& options);

/// Samples the scenario, runs the selected checks and fills the report. Exit
/// code 3 when more than half of the points are skipped, 1 when a gating
/// check fails, 0 otherwise.
RunReport run_analysis(const Scenario& scenario, const RunOptions& options = {});

std::vector<std::string> builtin_names();
std::string builtin_text(const std::string& name);
Scenario load_builtin(const std::string& name, const ParamOverrides& overrides = {});

// Runs a built-in example with default parameters unless overridden.
RunReport verify_builtin(const std::string& name, const ParamOverrides& overrides = {}, const RunOptions& options = {});

}  // namespace slantgeo
