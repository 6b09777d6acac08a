#include "slantgeo/report.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"
#include "slantgeo/errors.hpp"

namespace slantgeo {

namespace {

using nlohmann::json;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double get_num(const json& j, const char* key) {
  const json& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

Verdict verdict_from(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "not-applicable") return Verdict::not_applicable;
  throw InputError("unknown verdict '" + s + "'");
}

CheckRole role_from(const std::string& s) {
  if (s == "identity") return CheckRole::identity;
  if (s == "inequality") return CheckRole::inequality;
  if (s == "clause") return CheckRole::clause;
  if (s == "relation") return CheckRole::relation;
  throw InputError("unknown check role '" + s + "'");
}

json check_json(const CheckReport& c) {
  json j = {{"id", c.id},
            {"role", to_string(c.role)},
            {"residual", num(c.residual)},
            {"tolerance", num(c.tolerance)},
            {"verdict", to_string(c.verdict)},
            {"notes", c.notes},
            {"points", c.points},
            {"worst_point", c.worst_point}};
  if (c.inequality) {
    j["lhs"] = num(c.inequality->lhs);
    j["rhs"] = num(c.inequality->rhs);
    j["slack"] = num(c.inequality->slack);
    j["oracle_slack"] = num(c.inequality->oracle_slack);
    j["equality_expected"] = c.inequality->equality_expected;
  }
  return j;
}

CheckReport check_from(const json& j) {
  CheckReport c;
  c.id = j.at("id").get<std::string>();
  c.role = role_from(j.at("role").get<std::string>());
  c.residual = get_num(j, "residual");
  c.tolerance = get_num(j, "tolerance");
  c.verdict = verdict_from(j.at("verdict").get<std::string>());
  c.notes = j.at("notes").get<std::string>();
  c.points = j.at("points").get<std::vector<int>>();
  c.worst_point = j.at("worst_point").get<int>();
  if (j.contains("slack")) {
    InequalityReport r;
    r.check_id = c.id;
    r.lhs = get_num(j, "lhs");
    r.rhs = get_num(j, "rhs");
    r.slack = get_num(j, "slack");
    r.oracle_slack = get_num(j, "oracle_slack");
    r.equality_expected = j.at("equality_expected").get<bool>();
    r.verdict = c.verdict;
    c.inequality = r;
  }
  return c;
}

}  // namespace

const char* library_version() { return SLANTGEO_VERSION; }

std::string to_json(const RunReport& r) {
  json j;
  j["scenario"] = r.scenario;
  j["digest"] = r.digest;
  j["tool"] = r.tool;
  j["version"] = r.version;
  j["side"] = r.side;
  j["seed"] = r.seed;
  j["status"] = r.status;
  j["exit_code"] = r.exit_code;
  j["points"] = json::array();
  for (const PointSummary& p : r.points) {
    json pj = {{"index", p.index},
               {"point", json::array()},
               {"rank", p.rank},
               {"lambda", num(p.lambda)},
               {"theta", num(p.theta)},
               {"slant_spread", num(p.slant_spread)},
               {"conformal_residual", num(p.conformal_residual)}};
    for (double x : p.point) pj["point"].push_back(num(x));
    j["points"].push_back(std::move(pj));
  }
  j["skipped_points"] = json::array();
  for (const SkippedPoint& s : r.skipped_points) {
    json sj = {{"index", s.index}, {"point", json::array()}, {"reason", s.reason}};
    for (double x : s.point) sj["point"].push_back(num(x));
    j["skipped_points"].push_back(std::move(sj));
  }
  j["checks"] = json::array();
  for (const CheckReport& c : r.checks) j["checks"].push_back(check_json(c));
  j["paper_notes"] = json::array();
  for (const PaperNote& n : r.paper_notes) {
    j["paper_notes"].push_back(
        {{"id", n.id}, {"kind", "paper-note"}, {"check", n.check}, {"message", n.message}, {"value", num(n.value)}});
  }
  if (r.wall_time_s) j["wall_time_s"] = *r.wall_time_s;
  return j.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    RunReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.digest = j.at("digest").get<std::string>();
    r.tool = j.at("tool").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.side = j.at("side").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.status = j.at("status").get<std::string>();
    r.exit_code = j.at("exit_code").get<int>();
    for (const json& pj : j.at("points")) {
      PointSummary p;
      p.index = pj.at("index").get<int>();
      for (const json& x : pj.at("point")) p.point.push_back(x.is_null() ? std::numeric_limits<double>::infinity() : x.get<double>());
      p.rank = pj.at("rank").get<int>();
      p.lambda = get_num(pj, "lambda");
      p.theta = get_num(pj, "theta");
      p.slant_spread = get_num(pj, "slant_spread");
      p.conformal_residual = get_num(pj, "conformal_residual");
      r.points.push_back(std::move(p));
    }
    for (const json& sj : j.at("skipped_points")) {
      SkippedPoint s;
      s.index = sj.at("index").get<int>();
      for (const json& x : sj.at("point")) s.point.push_back(x.is_null() ? std::numeric_limits<double>::infinity() : x.get<double>());
      s.reason = sj.at("reason").get<std::string>();
      r.skipped_points.push_back(std::move(s));
    }
    for (const json& cj : j.at("checks")) r.checks.push_back(check_from(cj));
    for (const json& nj : j.at("paper_notes")) {
      r.paper_notes.push_back({nj.at("id").get<std::string>(), nj.at("check").get<std::string>(),
                               nj.at("message").get<std::string>(), get_num(nj, "value")});
    }
    if (j.contains("wall_time_s")) r.wall_time_s = j.at("wall_time_s").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

std::string report_schema() {
  const json number_or_null = {{"type", json::array({"number", "null"})}};
  const json vec = {{"type", "array"}, {"items", number_or_null}};
  const json point = {
      {"type", "object"},
      {"required", {"index", "point", "rank", "lambda", "theta", "slant_spread", "conformal_residual"}},
      {"properties",
       {{"index", {{"type", "integer"}}},
        {"point", vec},
        {"rank", {{"type", "integer"}}},
        {"lambda", number_or_null},
        {"theta", number_or_null},
        {"slant_spread", number_or_null},
        {"conformal_residual", number_or_null}}}};
  const json skipped = {{"type", "object"},
                        {"required", {"index", "point", "reason"}},
                        {"properties", {{"index", {{"type", "integer"}}}, {"point", vec}, {"reason", {{"type", "string"}}}}}};
  const json check = {
      {"type", "object"},
      {"required", {"id", "role", "residual", "tolerance", "verdict", "notes", "points", "worst_point"}},
      {"properties",
       {{"id", {{"type", "string"}}},
        {"role", {{"enum", {"identity", "inequality", "clause", "relation"}}}},
        {"residual", number_or_null},
        {"tolerance", number_or_null},
        {"verdict", {{"enum", {"pass", "fail", "not-applicable"}}}},
        {"notes", {{"type", "string"}}},
        {"points", {{"type", "array"}, {"items", {{"type", "integer"}}}}},
        {"worst_point", {{"type", "integer"}}},
        {"lhs", number_or_null},
        {"rhs", number_or_null},
        {"slack", number_or_null},
        {"oracle_slack", number_or_null},
        {"equality_expected", {{"type", "boolean"}}}}}};
  const json note = {{"type", "object"},
                     {"required", {"id", "kind", "check", "message", "value"}},
                     {"properties",
                      {{"id", {{"type", "string"}}},
                       {"kind", {{"const", "paper-note"}}},
                       {"check", {{"type", "string"}}},
                       {"message", {{"type", "string"}}},
                       {"value", number_or_null}}}};
  const json schema = {
      {"$schema", "http://json-schema.org/draft-07/schema#"},
      {"title", "slantgeo run report"},
      {"type", "object"},
      {"required",
       {"scenario", "digest", "tool", "version", "side", "seed", "status", "exit_code", "points", "skipped_points",
        "checks", "paper_notes"}},
      {"properties",
       {{"scenario", {{"type", "string"}}},
        {"digest", {{"type", "string"}}},
        {"tool", {{"type", "string"}}},
        {"version", {{"type", "string"}}},
        {"side", {{"enum", {"domain", "range"}}}},
        {"seed", {{"type", "integer"}, {"minimum", 0}}},
        {"status", {{"enum", {"pass", "fail", "degenerate"}}}},
        {"exit_code", {{"type", "integer"}}},
        {"points", {{"type", "array"}, {"items", point}}},
        {"skipped_points", {{"type", "array"}, {"items", skipped}}},
        {"checks", {{"type", "array"}, {"items", check}}},
        {"paper_notes", {{"type", "array"}, {"items", note}}},
        {"wall_time_s", {{"type", "number"}}}}}};
  return schema.dump(2) + "\n";
}

}  // namespace slantgeo
