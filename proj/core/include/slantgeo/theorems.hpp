#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slantgeo/connection.hpp"

namespace slantgeo {

enum class Verdict { pass, fail, not_applicable };

// identity and inequality checks decide the run status; clause and relation
// checks are observations reported alongside.
enum class CheckRole { identity, inequality, clause, relation };

const char* to_string(Verdict v);
const char* to_string(CheckRole r);
bool is_gating(CheckRole r);

struct InequalityReport {
  std::string check_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool equality_expected = false;
  double oracle_slack = 0.0;
  Verdict verdict = Verdict::pass;
};

struct CheckReport {
  std::string id;
  CheckRole role = CheckRole::identity;
  double residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::not_applicable;
  std::string notes;
  std::vector<int> points;  // indices of the evaluated sample points
  int worst_point = -1;
  std::optional<InequalityReport> inequality;  // worst case for inequality checks
};

struct PaperNote {
  std::string id;
  std::string check;
  std::string message;
  double value = 0.0;
};

struct PointSummary {
  int index = 0;
  std::vector<double> point;
  int rank = 0;
  double lambda = 0.0;
  double theta = 0.0;
  double slant_spread = 0.0;
  double conformal_residual = 0.0;
};

struct SkippedPoint {
  int index = 0;
  std::vector<double> point;
  std::string reason;
};

// A vector printed in the source material for comparison with the derived split.
struct PrintedVector {
  enum class Kind { kernel, horizontal } kind = Kind::kernel;
  std::string label;
  std::vector<ScalarExpr> components;
};

struct SuiteConfig {
  std::shared_ptr<const SmoothMap> map;
  Side side = Side::domain;
  std::optional<ScalarExpr> declared_lambda;
  // Domain side: expression in source coordinates; range side: target coordinates.
  std::optional<ScalarExpr> declared_theta;
  double v = 0.0;
  SplitOptions split;
  std::map<std::string, double> tolerance_overrides;
  double tol_scale = 1.0;
  std::vector<std::string> only;  // ids or id prefixes; empty selects everything
  int probe_pairs = 16;
  std::uint64_t seed = 42;
  std::vector<PrintedVector> printed;
};

struct SuiteResult {
  std::vector<CheckReport> checks;
  std::vector<PaperNote> paper_notes;
  std::vector<PointSummary> points;
  std::vector<SkippedPoint> skipped;
  bool gating_pass() const;
};

double default_tolerance(const std::string& id);
double tolerance_for(const SuiteConfig& config, const std::string& id);
bool selected(const SuiteConfig& config, const std::string& id);
std::vector<std::string> check_ids();
// True when `selector` names a check or a dotted prefix of one.
bool is_known_selector(const std::string& selector);

// Runs every applicable check over the points. Points where the map is
// degenerate are listed as skipped.
SuiteResult run_suite(const SuiteConfig& config, const std::vector<Vec>& points);

// Algebraic identities of the chosen side at the points.
std::vector<CheckReport> lemma_suite(const SuiteConfig& config, const std::vector<Vec>& points, Side side);

// All reports whose id equals `id` or starts with `id` + ".".
std::vector<CheckReport> theorem_condition(const SuiteConfig& config, const std::vector<Vec>& points,
                                           const std::string& id);

/// Vertical Ricci inequality at one point and one vertical vector u, with the
/// ambient curvature taken from the complex-space-form formula at v.
InequalityReport ricci_vertical_check(const MapGeometry& geo, double v, double theta, const Vec& u,
                                      double tolerance = 1e-8);

/// Horizontal Ricci inequality for a horizontal x; lambda_jet carries the
/// dilation with first and second derivatives.
InequalityReport ricci_horizontal_check(const MapGeometry& geo, double v, const ScalarJet& lambda_jet, const Vec& x,
                                        double tolerance = 1e-8);

struct NormExpansion {
  double range_vector_gap = 0.0;  // |sin^2 B(Y,Y)^range - sum of named terms|
  double range_norm_gap = 0.0;    // |sin^4 |B^range|^2 - Gram expansion|
  double perp_vector_gap = 0.0;
  double perp_norm_gap = 0.0;
  std::vector<Vec> range_terms;
  std::vector<Vec> perp_terms;
};

/// Range-side expansion of sin^2(Theta) (nabla G*)(Y,Y) for horizontal y.
/// y_theta is Y(Theta); lambda_jet supplies 1/lambda^2 and its gradient for
/// the horizontal lift.
NormExpansion norm_expansion_check(const MapGeometry& geo, double theta, double y_theta, const ScalarJet& lambda_jet,
                                   const Vec& y);

}  // namespace slantgeo
