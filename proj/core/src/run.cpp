#include "slantgeo/run.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "slantgeo/errors.hpp"
#include "slantgeo_builtin_data.hpp"

namespace slantgeo {

SuiteConfig suite_config(const Scenario& scenario, const RunOptions& options) {
  if (!(options.tol_scale > 0.0)) throw InputError("tolerance scale must be positive");
  SuiteConfig c;
  c.map = scenario.map;
  c.side = scenario.side;
  c.declared_lambda = scenario.declared_lambda;
  c.declared_theta = scenario.declared_theta;
  c.v = scenario.v.value_or(0.0);
  c.split = scenario.split;
  c.tolerance_overrides = scenario.tolerances;
  c.tol_scale = options.tol_scale;
  c.only = options.only.empty() ? scenario.only : options.only;
  c.probe_pairs = scenario.probe_pairs;
  c.seed = options.seed.value_or(scenario.sample.seed);
  c.printed = scenario.printed;
  for (const std::string& id : c.only) {
    if (!is_known_selector(id)) throw InputError("unknown check id '" + id + "'");
  }
  return c;
}

RunReport run_analysis(const Scenario& scenario, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SampleSpec sample = scenario.sample;
  if (options.seed) sample.seed = *options.seed;
  if (options.points) {
    if (*options.points < 1) throw InputError("point count must be positive");
    sample.points = *options.points;
  }
  const SuiteConfig config = suite_config(scenario, options);
  const std::vector<Vec> pts = sample_points(sample, scenario.map->m());
  SuiteResult result = run_suite(config, pts);

  RunReport r;
  r.scenario = scenario.name;
  r.digest = scenario.digest;
  r.version = library_version();
  r.side = scenario.side == Side::domain ? "domain" : "range";
  r.seed = sample.seed;
  r.points = std::move(result.points);
  r.skipped_points = std::move(result.skipped);
  r.checks = std::move(result.checks);
  r.paper_notes = std::move(result.paper_notes);
  const bool degenerate = pts.empty() || 2 * r.skipped_points.size() > pts.size();
  if (degenerate) {
    r.status = "degenerate";
    r.exit_code = kExitDegenerate;
  } else if (std::any_of(r.checks.begin(), r.checks.end(),
                         [](const CheckReport& c) { return is_gating(c.role) && c.verdict == Verdict::fail; })) {
    r.status = "fail";
    r.exit_code = kExitCheckFailure;
  } else {
    r.status = "pass";
    r.exit_code = kExitPass;
  }
  if (options.timestamp) {
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

std::vector<std::string> builtin_names() { return {"ex3_1", "ex4_1"}; }

std::string builtin_text(const std::string& name) {
  if (name == "ex3_1") return builtin_data::ex3_1;
  if (name == "ex4_1") return builtin_data::ex4_1;
  throw InputError("unknown built-in scenario '" + name + "' (expected ex3_1 or ex4_1)");
}

Scenario load_builtin(const std::string& name, const ParamOverrides& overrides) {
  return parse_scenario(builtin_text(name), overrides, name);
}

namespace {

// The example allows a non-constant t; with t = x1 the structure is not parallel.
void variable_t_note(const Scenario& base, const ParamOverrides& overrides, const RunOptions& options,
                     RunReport& report) {
  if (overrides.bindings.contains("t")) return;
  ParamOverrides variant = overrides;
  variant.values.erase("t");
  variant.bindings["t"] = "x1";
  const Scenario sc = parse_scenario(builtin_text(base.name), variant, base.name);
  SampleSpec sample = sc.sample;
  if (options.seed) sample.seed = *options.seed;
  if (options.points) sample.points = *options.points;
  double worst = 0.0;
  for (const Vec& p : sample_points(sample, sc.map->m())) {
    worst = std::max(worst, hermitian_kahler_residuals(sc.map->source(), as_span(p)).kahler);
  }
  if (worst > 1e-10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", worst);
    report.paper_notes.push_back(
        {"kahler.variable_t", "structure.kahler",
         std::string("with the slant function t = x1 the structure J_t is not parallel (max |(nabla J)| = ") + buf +
             "); the Kähler hypothesis of the example needs t constant",
         worst});
  }
}

}  // namespace

RunReport verify_builtin(const std::string& name, const ParamOverrides& overrides, const RunOptions& options) {
  const Scenario sc = load_builtin(name, overrides);
  RunReport r = run_analysis(sc, options);
  const SuiteConfig probe = suite_config(sc, options);
  if (name == "ex3_1" && selected(probe, "structure.kahler")) variable_t_note(sc, overrides, options, r);
  return r;
}

}  // namespace slantgeo
