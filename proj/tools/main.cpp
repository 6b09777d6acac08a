// slantgeo command-line front end.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slantgeo/errors.hpp"
#include "slantgeo/run.hpp"

namespace sg = slantgeo;

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  double tol_scale = 1.0;
  std::string json_path;
  bool no_timestamp = false;
  std::vector<std::string> params;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--seed", f.seed, "Sampling and probe seed");
  app->add_option("--points", f.points, "Number of sample points");
  app->add_option("--tol-scale", f.tol_scale, "Multiply every tolerance by this factor");
  app->add_option("--json", f.json_path, "Write the JSON report to this file instead of stdout");
  app->add_flag("--no-timestamp", f.no_timestamp, "Omit wall time from the report");
  app->add_option("--param", f.params, "Parameter override name=value; a non-numeric value binds an expression");
}

sg::ParamOverrides parse_overrides(const std::vector<std::string>& items) {
  sg::ParamOverrides o;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw sg::InputError("--param expects name=value, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      const double x = std::stod(value, &used);
      if (used == value.size()) {
        o.values[name] = x;
        continue;
      }
    } catch (const std::exception&) {
    }
    o.bindings[name] = value;
  }
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sg::InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string stem(const std::string& path) {
  std::string base = path.substr(path.find_last_of("/\\") + 1);
  const auto dot = base.rfind('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

sg::RunOptions options_from(const CommonFlags& f, const std::vector<std::string>& only) {
  sg::RunOptions o;
  o.seed = f.seed;
  o.points = f.points;
  o.tol_scale = f.tol_scale;
  o.only = only;
  o.timestamp = !f.no_timestamp;
  return o;
}

void print_summary(const sg::RunReport& r, std::ostream& os) {
  int pass = 0, fail = 0, na = 0;
  for (const auto& c : r.checks) {
    if (c.verdict == sg::Verdict::pass) ++pass;
    else if (c.verdict == sg::Verdict::fail) ++fail;
    else ++na;
  }
  os << r.scenario << ": " << r.status << " (" << r.points.size() << " points, " << r.skipped_points.size()
     << " skipped; checks " << pass << " pass, " << fail << " fail, " << na << " not-applicable; "
     << r.paper_notes.size() << " paper-notes)\n";
  for (const auto& c : r.checks) {
    if (c.verdict == sg::Verdict::fail) {
      os << (sg::is_gating(c.role) ? "  FAIL " : "  violated ") << c.id << " [" << sg::to_string(c.role)
         << "] residual " << c.residual << " > " << c.tolerance << "\n";
    }
  }
  for (const auto& n : r.paper_notes) os << "  note " << n.id << ": " << n.message << "\n";
  if (r.exit_code == sg::kExitDegenerate && !r.skipped_points.empty()) {
    os << "  degenerate: " << r.skipped_points.front().reason << "\n";
  }
}

int emit(const sg::RunReport& r, const CommonFlags& f) {
  const std::string doc = sg::to_json(r);
  if (f.json_path.empty()) {
    std::cout << doc;
    if (r.exit_code != sg::kExitPass) print_summary(r, std::cerr);
  } else {
    std::ofstream out(f.json_path, std::ios::binary);
    if (!out) throw sg::InputError("cannot write '" + f.json_path + "'");
    out << doc;
    print_summary(r, std::cout);
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual checks for conformal pointwise slant Riemannian maps"};
  app.set_version_flag("--version", std::string(sg::library_version()));
  app.require_subcommand(1);

  CommonFlags analyze_flags, check_flags, verify_flags;
  std::string analyze_file, check_file, builtin;
  std::vector<std::string> only;
  bool schema = false;

  auto* analyze = app.add_subcommand("analyze", "Run every check on a scenario file");
  analyze->add_option("file", analyze_file, "Scenario file")->required();
  add_common(analyze, analyze_flags);

  auto* check = app.add_subcommand("check", "Run selected checks on a scenario file");
  check->add_option("file", check_file, "Scenario file")->required();
  check->add_option("--only", only, "Check ids or id prefixes")->delimiter(',')->required();
  add_common(check, check_flags);

  auto* verify = app.add_subcommand("verify", "Run a built-in example");
  verify->add_option("name", builtin, "Built-in example")->required()->check(CLI::IsMember(sg::builtin_names()));
  add_common(verify, verify_flags);

  auto* report = app.add_subcommand("report", "Report format utilities");
  report->add_flag("--schema", schema, "Print the JSON schema of the report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sg::kExitInputError;
  }

  try {
    if (*report) {
      std::cout << sg::report_schema();
      return sg::kExitPass;
    }
    if (*verify) {
      const auto r = sg::verify_builtin(builtin, parse_overrides(verify_flags.params), options_from(verify_flags, {}));
      return emit(r, verify_flags);
    }
    const bool is_check = bool(*check);
    const CommonFlags& flags = is_check ? check_flags : analyze_flags;
    const std::string& file = is_check ? check_file : analyze_file;
    const auto sc = sg::parse_scenario(read_file(file), parse_overrides(flags.params), stem(file));
    return emit(sg::run_analysis(sc, options_from(flags, is_check ? only : std::vector<std::string>{})), flags);
  } catch (const sg::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return sg::kExitInputError;
  } catch (const sg::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return sg::kExitInputError;
  } catch (const sg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sg::kExitDegenerate;
  }
}
