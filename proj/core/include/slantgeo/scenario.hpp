#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slantgeo/theorems.hpp"

namespace slantgeo {

struct SampleSpec {
  std::vector<std::pair<double, double>> box;  // per source coordinate
  int points = 64;
  std::uint64_t seed = 42;
  std::vector<Vec> explicit_points;  // used instead of the box when non-empty
};

struct Scenario {
  std::string name;
  std::string digest;  // hex FNV-1a of the text and parameter overrides
  std::map<std::string, std::shared_ptr<const ChartManifold>> manifolds;
  std::string source_name;
  std::string target_name;
  std::shared_ptr<const SmoothMap> map;
  Side side = Side::domain;
  ParamMap params;
  BindingMap bindings;
  std::optional<ScalarExpr> declared_lambda;
  std::optional<ScalarExpr> declared_theta;
  std::optional<double> v;
  SplitOptions split;
  SampleSpec sample;
  std::map<std::string, double> tolerances;
  std::vector<std::string> only;
  int probe_pairs = 16;
  std::vector<PrintedVector> printed;
};

// Parameter values from outside the file. A value that is not a number is an
// expression binding (e.g. t = "x1").
struct ParamOverrides {
  ParamMap values;
  BindingMap bindings;
};

/// Parses the sectioned key = value scenario format. Errors are InputError
/// with the 1-based line number.
Scenario parse_scenario(std::string_view text, const ParamOverrides& overrides = {}, std::string name = "scenario");

// Sample points: the explicit list, or a Cranley-Patterson shifted Halton
// sequence in the box with the shift drawn from the seed.
std::vector<Vec> sample_points(const SampleSpec& sample, int dim);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace slantgeo
