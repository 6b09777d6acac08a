#include <gtest/gtest.h>

#include "json.hpp"
#include "slantgeo/errors.hpp"
#include "slantgeo/run.hpp"

using namespace slantgeo;

TEST(Report, JsonRoundTripIsByteIdentical) {
  RunOptions o;
  o.points = 8;
  for (const char* name : {"ex3_1", "ex4_1"}) {
    const RunReport r = verify_builtin(name, {}, o);
    const std::string text = to_json(r);
    EXPECT_EQ(to_json(report_from_json(text)), text) << name;
  }
}

TEST(Report, NonFiniteNumbersBecomeNull) {
  RunReport r;
  r.scenario = "x";
  CheckReport c;
  c.id = "sff.conformal";
  c.residual = std::numeric_limits<double>::infinity();
  r.checks.push_back(c);
  const std::string text = to_json(r);
  EXPECT_TRUE(nlohmann::json::parse(text)["checks"][0]["residual"].is_null());
  EXPECT_EQ(to_json(report_from_json(text)), text);
}

TEST(Report, SchemaListsRequiredKeys) {
  const auto schema = nlohmann::json::parse(report_schema());
  const auto& req = schema["required"];
  for (const char* key : {"scenario", "points", "checks", "paper_notes"}) {
    EXPECT_NE(std::find(req.begin(), req.end(), key), req.end()) << key;
  }
}

TEST(Report, MalformedInputIsAnInputError) {
  EXPECT_THROW(report_from_json("{"), InputError);
  EXPECT_THROW(report_from_json("{}"), InputError);
}

TEST(Report, TimestampIsOptional) {
  RunOptions o;
  o.points = 4;
  o.timestamp = false;
  EXPECT_EQ(to_json(verify_builtin("ex3_1", {}, o)).find("wall_time_s"), std::string::npos);
  o.timestamp = true;
  EXPECT_NE(to_json(verify_builtin("ex3_1", {}, o)).find("wall_time_s"), std::string::npos);
}
