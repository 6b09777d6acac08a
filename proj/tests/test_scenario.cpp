#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "slantgeo/errors.hpp"
#include "slantgeo/run.hpp"
#include "slantgeo/scenario.hpp"

using namespace slantgeo;

namespace {

const std::string kMinimal = R"([manifold M]
dim = 3
metric = identity

[manifold N]
dim = 2
metric = identity

[map]
source = M
target = N
F.1 = "x1"
F.2 = "x2"
side = domain
)";

// Message and line number of the InputError raised by parsing `text`.
std::pair<std::string, int> error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const InputError& e) {
    return {e.what(), e.line()};
  }
  return {"", -1};
}

}  // namespace

TEST(Scenario, BuiltinsParse) {
  const Scenario a = load_builtin("ex3_1");
  EXPECT_EQ(a.map->m(), 4);
  EXPECT_EQ(a.map->n(), 4);
  ASSERT_TRUE(a.declared_lambda.has_value());
  EXPECT_NEAR(a.declared_lambda->eval(std::vector<double>{0.5, 0, 0, 0}), std::exp(0.5), 1e-15);
  ASSERT_TRUE(a.declared_theta.has_value());
  EXPECT_DOUBLE_EQ(a.declared_theta->eval(std::vector<double>{0, 0, 0, 0}), 0.7);
  EXPECT_EQ(a.side, Side::domain);
  const Scenario b = load_builtin("ex4_1");
  EXPECT_EQ(b.map->m(), 6);
  EXPECT_EQ(b.map->n(), 4);
  EXPECT_DOUBLE_EQ(b.params.at("a"), 0.3);
  EXPECT_DOUBLE_EQ(b.params.at("b"), 1.0);
  EXPECT_EQ(b.side, Side::range);
  EXPECT_THROW(load_builtin("ex9_9"), InputError);
}

TEST(Scenario, OverridesReplaceParameters) {
  ParamOverrides o;
  o.values["a"] = 0.7;
  const Scenario b = load_builtin("ex4_1", o);
  EXPECT_DOUBLE_EQ(b.params.at("a"), 0.7);
  EXPECT_NE(b.digest, load_builtin("ex4_1").digest);
}

TEST(Scenario, LowerTriangleMetricEntryIsRejected) {
  const auto [msg, line] = error_of("[manifold M]\ndim = 2\ng.1.1 = \"1\"\ng.2.1 = \"0\"\ng.2.2 = \"1\"\n");
  EXPECT_NE(msg.find("lower-triangle metric entry; declare i ≤ j"), std::string::npos) << msg;
  EXPECT_EQ(line, 4);
}

TEST(Scenario, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_of(kMinimal + "colour = red\n").second, 15);
  EXPECT_EQ(error_of("[manifold M]\ndim = 2\ndim = 3\n").second, 3);
  EXPECT_EQ(error_of("[bogus]\n").second, 1);
  EXPECT_NE(error_of(kMinimal + "F.3 = \"x1\"\n").first.find("exceeds target dim"), std::string::npos);
  const auto [msg, line] = error_of(kMinimal + "lambda = \"exp(x1\"\n");
  EXPECT_NE(msg.find("malformed expression"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
  EXPECT_EQ(line, 15);
  EXPECT_NE(error_of(kMinimal + "lambda = exp(x1)\n").first.find("quoted"), std::string::npos);
  EXPECT_NE(error_of(kMinimal + "\n[checks]\nonly = nonsense\n").first.find("unknown check id"), std::string::npos);
  EXPECT_NE(error_of(kMinimal + "\n[sample]\nbox = 0, 1\npoint.1 = \"2, 0, 0\"\n").first.find("outside"),
            std::string::npos);
}

TEST(Scenario, MissingComponentIsDimensionMismatch) {
  std::string text = kMinimal;
  text.replace(text.find("F.2 = \"x2\"\n"), 11, "");
  EXPECT_NE(error_of(text).first.find("missing component"), std::string::npos);
}

TEST(Sampling, DeterministicAndInsideTheBox) {
  SampleSpec s;
  s.box = {{-1, 1}, {0, 2}, {5, 5.5}};
  s.points = 200;
  s.seed = 42;
  const auto a = sample_points(s, 3);
  const auto b = sample_points(s, 3);
  ASSERT_EQ(a.size(), 200u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i], b[i]);
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(a[i](k), s.box[static_cast<std::size_t>(k)].first);
      EXPECT_LE(a[i](k), s.box[static_cast<std::size_t>(k)].second);
    }
  }
  s.seed = 43;
  EXPECT_NE(sample_points(s, 3)[0], a[0]);
}

TEST(Sampling, ExplicitPointsAreUsedVerbatim) {
  const Scenario sc = parse_scenario(kMinimal + "\n[sample]\nbox = -1, 1\npoint.1 = \"0.5, 0.25, -1\"\n");
  const auto pts = sample_points(sc.sample, 3);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_DOUBLE_EQ(pts[0](2), -1.0);
}
