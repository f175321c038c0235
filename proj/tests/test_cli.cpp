// End-to-end tests of the certquad binary: flags, exit codes and the
// stability of the machine-readable output.

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr combined
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(CERTQUAD_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe))
    output.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

nlohmann::json run_json(const std::string& args, int expect_exit = 0) {
  const RunResult r = run_cli(args + " --format json");
  CAPTURE(r.output);
  REQUIRE(r.exit_code == expect_exit);
  return nlohmann::json::parse(r.output);
}

std::string write_ramp_csv() {
  const auto path =
      std::filesystem::temp_directory_path() / "certquad_test_ramp.csv";
  std::ofstream out(path);
  out << "0,0\n2,4\n";
  return path.string();
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : s) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

}  // namespace

TEST_CASE("integrate: single-interval JSON report") {
  const auto j = run_json(
      "integrate --function \"t^2\" --a 0 --b 1 --l 0 --L 2 "
      "--rule midrange --h 0 --x 0.5");
  // schema-stable keys
  for (const char* key : {"request", "value", "bound", "cells", "oracle",
                          "error", "meta"})
    REQUIRE(j.contains(key));
  REQUIRE(j["value"].get<double>() == 0.25);
  REQUIRE(j["bound"].get<double>() == 0.25);
  REQUIRE(j["cells"].size() == 1);
  REQUIRE(j["oracle"].is_null());
  REQUIRE(j["error"].is_null());
  REQUIRE(j["request"]["rule"] == "midrange");
  REQUIRE(j["meta"]["heuristic_slopes"] == false);
}

TEST_CASE("integrate: adaptive refinement reaches 16 cells under tol 0.01") {
  const auto j = run_json(
      "integrate --function \"t^2\" --a 0 --b 1 --l 0 --L 2 --tol 0.01");
  REQUIRE(j["bound"].get<double>() <= 0.01);
  REQUIRE(j["cells"].size() == 16);
}

TEST_CASE("integrate: tabulated ramp at h = 1 is exact") {
  const std::string ramp = write_ramp_csv();
  const auto j = run_json("integrate --table " + ramp + " --rule midrange --h 1");
  REQUIRE(j["value"].get<double>() == 4.0);
  REQUIRE(j["bound"].get<double>() == 0.0);
  REQUIRE(j["request"]["l"].get<double>() == 2.0);
  REQUIRE(j["request"]["L"].get<double>() == 2.0);
}

TEST_CASE("integrate: --verify appends oracle fields without changing them") {
  const std::string base =
      "integrate --function \"exp(t)\" --a 0 --b 1 --l 1 --L 2.7182818284590452";
  const auto plain = run_json(base);
  const auto verified = run_json(base + " --verify");
  REQUIRE(plain["value"] == verified["value"]);
  REQUIRE(plain["bound"] == verified["bound"]);
  REQUIRE(verified["oracle"].is_number());
  REQUIRE(verified["error"].is_number());
  REQUIRE(std::fabs(verified["oracle"].get<double>() -
                    1.7182818284590452) < 1e-9);
}

TEST_CASE("integrate: estimated slopes are gated and marked heuristic") {
  const RunResult refused = run_cli(
      "integrate --function \"t^2\" --a 0 --b 1 --estimate-slopes 100");
  REQUIRE(refused.exit_code == 2);
  REQUIRE(refused.output.find("--accept-estimated") != std::string::npos);

  const auto j = run_json(
      "integrate --function \"t^2\" --a 0 --b 1 --estimate-slopes 100 "
      "--accept-estimated");
  REQUIRE(j["meta"]["heuristic_slopes"] == true);
  REQUIRE(j["request"]["estimated_slopes"] == true);
}

TEST_CASE("integrate: exit-code taxonomy") {
  // validation errors
  REQUIRE(run_cli("integrate --a 0 --b 1 --l 0 --L 2").exit_code == 2);
  REQUIRE(run_cli("integrate --function t --table x.csv --a 0 --b 1 --l 0 "
                  "--L 2").exit_code == 2);
  REQUIRE(run_cli("integrate --function \"t +\" --a 0 --b 1 --l 0 --L 2")
              .exit_code == 2);
  REQUIRE(run_cli("integrate --function t --a 0 --b 1 --l 0 --L 2 --h 1.5")
              .exit_code == 2);
  REQUIRE(run_cli("integrate --function t --a 0 --b 1 --l 0 --L 2 "
                  "--rule-preset simpson --h 0.25").exit_code == 2);
  REQUIRE(run_cli("integrate --function t --a 0 --b 1 --l 0 --L 2 --cells 4 "
                  "--tol 0.1").exit_code == 2);
  REQUIRE(run_cli("nonsense").exit_code == 2);
  const std::string ramp = write_ramp_csv();
  REQUIRE(run_cli("integrate --table " + ramp + " --l 0").exit_code == 2);

  // slope-consistency
  const RunResult slope = run_cli(
      "integrate --function \"t^2\" --a 0 --b 1 --l 5 --rule lower");
  REQUIRE(slope.exit_code == 3);
  REQUIRE(slope.output.find("slope-consistency") != std::string::npos);

  // adaptive budget
  const RunResult budget = run_cli(
      "integrate --function \"t^2\" --a 0 --b 1 --l 0 --L 2 --tol 1e-9 "
      "--max-cells 16");
  REQUIRE(budget.exit_code == 4);
  REQUIRE(budget.output.find("budget-exceeded") != std::string::npos);
}

TEST_CASE("integrate: composite and best selection") {
  const auto j = run_json(
      "integrate --function \"t^2\" --a 0 --b 1 --l 0 --L 2 --cells 2 "
      "--h 0.5");
  REQUIRE(j["value"].get<double>() == 0.34375);
  REQUIRE(j["bound"].get<double>() == 0.0625);

  const auto best = run_json(
      "integrate --function \"t^2\" --a 0 --b 1 --l 0 --L 2 --rule best "
      "--h 0 --x 0.5");
  REQUIRE(best["request"]["selected"] == "midrange");
  REQUIRE(best["bound"].get<double>() == 0.25);
}

TEST_CASE("prob cdf matches the worked envelope") {
  const auto j = run_json(
      "prob cdf --a 0 --b 1 --m 0 --M 2 --expectation 0.66666666666666663 "
      "--x 0.5 --h 0");
  REQUIRE(j["lo"].get<double>() == Catch::Approx(1.0 / 12.0).margin(1e-12));
  REQUIRE(j["hi"].get<double>() == Catch::Approx(7.0 / 12.0).margin(1e-12));

  REQUIRE(run_cli("prob cdf --a 0 --b 1 --m 0 --M 2 --expectation 0.5 --h 1")
              .exit_code == 2);
}

TEST_CASE("prob expectation collapses for the uniform model") {
  const auto j = run_json("prob expectation --a 0 --b 1 --m 1 --M 1");
  REQUIRE(j["lo"].get<double>() == 0.5);
  REQUIRE(j["hi"].get<double>() == 0.5);
  REQUIRE(j["width"].get<double>() == 0.0);
}

TEST_CASE("prob midpoint-check: pass and fail paths") {
  REQUIRE(run_cli("prob midpoint-check --a 0 --b 1 --m 0 --M 2 "
                  "--expectation 0.66666666666666663 --pr 0.25")
              .exit_code == 0);
  const RunResult fail = run_cli(
      "prob midpoint-check --a 0 --b 1 --m 0 --M 2 "
      "--expectation 0.66666666666666663 --pr 1");
  REQUIRE(fail.exit_code == 5);
  REQUIRE(fail.output.find("envelope-inconsistency") != std::string::npos);
}

TEST_CASE("sweep: rows reproduce single calls bit-exactly; summary flags 0.5") {
  const RunResult sweep = run_cli(
      "sweep --function \"t^2\" --a 0 --b 1 --l 0 --L 2 --h-grid 11 "
      "--x-grid 3");
  REQUIRE(sweep.exit_code == 0);
  const auto lines = split_lines(sweep.output);
  REQUIRE(lines.front() == "h,x,family,value,bound,error,ratio");
  // 11 h * 3 x * 3 families + header + summary
  REQUIRE(lines.size() == 11 * 3 * 3 + 2);
  REQUIRE(lines.back().find(",summary,") != std::string::npos);
  REQUIRE(lines.back().substr(0, 4) == "0.5,");

  // the h = 0, x = 0.5 midrange row matches a direct integrate call
  const auto j = run_json(
      "integrate --function \"t^2\" --a 0 --b 1 --l 0 --L 2 --h 0 --x 0.5");
  char expect[128];
  std::snprintf(expect, sizeof(expect), "0,0.5,midrange,%.17g,%.17g",
                j["value"].get<double>(), j["bound"].get<double>());
  bool found = false;
  for (const auto& line : lines)
    if (line.rfind(expect, 0) == 0) found = true;
  REQUIRE(found);

  // the h = 1 row (x pinned to the midpoint) matches as well
  const auto j1 = run_json(
      "integrate --function \"t^2\" --a 0 --b 1 --l 0 --L 2 --h 1");
  std::snprintf(expect, sizeof(expect), "1,0.5,midrange,%.17g,%.17g",
                j1["value"].get<double>(), j1["bound"].get<double>());
  found = false;
  for (const auto& line : lines)
    if (line.rfind(expect, 0) == 0) found = true;
  REQUIRE(found);
}

TEST_CASE("sweep: affine integrand has all-zero bounds and errors") {
  const RunResult sweep = run_cli(
      "sweep --function \"3*t - 5\" --a 0 --b 1 --l 3 --L 3 --h-grid 3 "
      "--x-grid 3");
  REQUIRE(sweep.exit_code == 0);
  for (const auto& line : split_lines(sweep.output)) {
    if (line.find(",midrange,") == std::string::npos &&
        line.find(",lower,") == std::string::npos &&
        line.find(",upper,") == std::string::npos)
      continue;
    // h,x,family,value,bound,error,ratio
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    REQUIRE(fields.size() == 7);
    REQUIRE(std::stod(fields[4]) == 0.0);                // bound
    REQUIRE(std::fabs(std::stod(fields[5])) <= 1e-14);   // realized error
  }
}

TEST_CASE("text format carries the full-precision certificate") {
  const RunResult r = run_cli(
      "integrate --function \"t^2\" --a 0 --b 1 --l 0 --L 2 --h 0.5");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("value        0.375") != std::string::npos);
  REQUIRE(r.output.find("bound        0.125") != std::string::npos);
}
