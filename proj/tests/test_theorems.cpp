#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "slantgeo/errors.hpp"
#include "slantgeo/run.hpp"

using namespace slantgeo;

namespace {

Scenario load(const std::string& name, const ParamOverrides& o = {}) {
  std::ifstream in(std::string(SLANTGEO_TEST_SCENARIOS) + "/" + name + ".scn");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), o, name);
}

const CheckReport& check(const RunReport& r, const std::string& id) {
  const auto it = std::find_if(r.checks.begin(), r.checks.end(), [&](const CheckReport& c) { return c.id == id; });
  if (it == r.checks.end()) throw std::runtime_error("no check " + id);
  return *it;
}

bool has_note(const RunReport& r, const std::string& id) {
  return std::any_of(r.paper_notes.begin(), r.paper_notes.end(), [&](const PaperNote& n) { return n.id == id; });
}

RunOptions few(int n) {
  RunOptions o;
  o.points = n;
  o.timestamp = false;
  return o;
}

const std::vector<std::string> kScenarios{"ex3_1_planar",     "sphere_fibers", "sphere_fibers_perp", "holomorphic_curve",
                                          "warped_fibers",    "homothetic",    "riemannian_flat"};

}  // namespace

TEST(Selection, PrefixesMatchWholeComponents) {
  SuiteConfig c;
  c.only = {"domain_algebra"};
  EXPECT_TRUE(selected(c, "domain_algebra.omega_phi"));
  EXPECT_TRUE(selected(c, "domain_algebra.phi_isometry"));
  EXPECT_FALSE(selected(c, "domain_algebras"));
  EXPECT_FALSE(selected(c, "range_algebra.rho_squared"));
  EXPECT_TRUE(is_known_selector("range_norm_expansion"));
  EXPECT_TRUE(is_known_selector("sff.conformal"));
  EXPECT_FALSE(is_known_selector("no_such_check"));
  c.tol_scale = 10;
  c.tolerance_overrides["sff.conformal"] = 1e-3;
  EXPECT_DOUBLE_EQ(tolerance_for(c, "sff.conformal"), 1e-2);
  EXPECT_DOUBLE_EQ(tolerance_for(c, "shape_operator.duality"), default_tolerance("shape_operator.duality") * 10);
}

TEST(Roles, GatingIsIdentityAndInequality) {
  EXPECT_TRUE(is_gating(CheckRole::identity));
  EXPECT_TRUE(is_gating(CheckRole::inequality));
  EXPECT_FALSE(is_gating(CheckRole::clause));
  EXPECT_FALSE(is_gating(CheckRole::relation));
  EXPECT_EQ(to_string(Verdict::not_applicable), "not-applicable");
}

// Every gating check passes on each test scenario, and inequality slacks are
// never negative beyond tolerance.
TEST(Suite, GatingChecksPassOnAllScenarios) {
  for (const auto& name : kScenarios) {
    const RunReport r = run_analysis(load(name), few(12));
    EXPECT_EQ(r.exit_code, kExitPass) << name;
    for (const CheckReport& c : r.checks) {
      if (is_gating(c.role)) EXPECT_NE(c.verdict, Verdict::fail) << name << " " << c.id << " " << c.residual;
      if (c.inequality && c.verdict != Verdict::not_applicable) {
        EXPECT_GE(c.inequality->slack, -c.tolerance) << name << " " << c.id;
      }
    }
  }
}

TEST(Suite, RangeIdentitiesAreExercisedOnACurvedRange) {
  const RunReport r = run_analysis(load("holomorphic_curve"), few(12));
  for (const char* id : {"range_geodesic.identity", "range_norm_expansion.range", "range_norm_expansion.perp", "shape_operator.duality", "range_algebra.rho_squared", "range_algebra.varpi_isometry"}) {
    EXPECT_EQ(check(r, id).verdict, Verdict::pass) << id;
  }
  // The range is not totally geodesic here, so the clause is informative.
  EXPECT_EQ(check(r, "range_geodesic.geodesic").verdict, Verdict::fail);
}

TEST(Suite, RiemannianMapHasExactConformalIdentity) {
  const RunReport r = run_analysis(load("riemannian_flat"), few(16));
  EXPECT_LE(check(r, "sff.conformal").residual, 1e-10);
  EXPECT_LE(check(r, "declared_lambda").residual, 1e-12);
}

TEST(Suite, WarpedFibersRicciSlackIsTheSquaredT) {
  const RunReport r = run_analysis(load("warped_fibers"), few(8));
  const CheckReport& c = check(r, "ricci_vertical");
  ASSERT_TRUE(c.inequality.has_value());
  EXPECT_GT(c.inequality->slack, 0.0);
  EXPECT_EQ(check(r, "ricci_vertical.slack_oracle").verdict, Verdict::pass);
}

TEST(Suite, IdentityMapIsDegenerate) {
  const RunReport r = run_analysis(load("identity_map"), few(8));
  EXPECT_EQ(r.exit_code, kExitDegenerate);
  EXPECT_EQ(r.status, "degenerate");
  ASSERT_FALSE(r.skipped_points.empty());
  EXPECT_NE(r.skipped_points[0].reason.find("not a proper Riemannian-map candidate"), std::string::npos);
}

TEST(Suite, TinyToleranceScaleTurnsRoundoffIntoFailure) {
  RunOptions o = few(4);
  o.tol_scale = 1e-30;
  EXPECT_EQ(run_analysis(load("sphere_fibers"), o).exit_code, kExitCheckFailure);
}

TEST(Suite, NonzeroHolomorphicCurvatureIsCrossChecked) {
  ParamOverrides none;
  Scenario sc = load("homothetic");
  sc.v = 1.0;
  const RunReport r = run_analysis(sc, few(4));
  EXPECT_EQ(check(r, "space_form.crosscheck").verdict, Verdict::fail);
  EXPECT_NE(check(r, "ricci_vertical").notes.find("not checked"), std::string::npos);
}

TEST(Suite, SelectionRestrictsChecksAndNotes) {
  RunOptions o = few(4);
  o.only = {"domain_algebra"};
  const RunReport r = verify_builtin("ex3_1", {}, o);
  ASSERT_EQ(r.checks.size(), 7u);
  for (const auto& c : r.checks) EXPECT_EQ(c.id.rfind("domain_algebra", 0), 0u);
  EXPECT_TRUE(has_note(r, "domain_algebra.omega_phi.sign"));
  EXPECT_FALSE(has_note(r, "printed.horizontal"));
  o.only = {"no_such_check"};
  EXPECT_THROW(verify_builtin("ex3_1", {}, o), InputError);
}

TEST(Suite, LemmaSuiteAndConditionHelpers) {
  const Scenario sc = load_builtin("ex3_1");
  const SuiteConfig config = suite_config(sc, {});
  const std::vector<Vec> pts = sample_points(sc.sample, 4);
  const std::vector<Vec> some(pts.begin(), pts.begin() + 4);
  for (const CheckReport& c : lemma_suite(config, some, Side::domain)) {
    EXPECT_EQ(c.verdict, Verdict::pass) << c.id;
  }
  const auto harm = theorem_condition(config, some, "harmonicity");
  EXPECT_EQ(harm.size(), 4u);
}

TEST(Suite, ClauseObservationsOnTheDomainExample) {
  const RunReport r = verify_builtin("ex3_1", {}, few(8));
  EXPECT_EQ(check(r, "tension").verdict, Verdict::pass);
  EXPECT_EQ(check(r, "harmonicity.lambda_constant").verdict, Verdict::fail);
  EXPECT_TRUE(has_note(r, "relation.harmonicity"));
  EXPECT_TRUE(has_note(r, "kahler.variable_t"));
  EXPECT_FALSE(has_note(r, "kahler.residual"));
  EXPECT_TRUE(has_note(r, "printed.horizontal"));
  EXPECT_FALSE(has_note(r, "printed.kernel"));
}

TEST(Suite, RangeExampleFlagsOnlyTheWrongKernelVector) {
  const RunReport r = verify_builtin("ex4_1", {}, few(8));
  ASSERT_TRUE(has_note(r, "printed.kernel"));
  const auto it = std::find_if(r.paper_notes.begin(), r.paper_notes.end(),
                               [](const PaperNote& n) { return n.id == "printed.kernel"; });
  EXPECT_NE(it->message.find("K2"), std::string::npos);
  EXPECT_EQ(it->message.find("K3"), std::string::npos);
}
