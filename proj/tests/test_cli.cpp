#include "doctest.h"

#include "laue/cli.hpp"
#include "laue/common.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace laue;
using namespace laue::cli;

namespace {

RunConfig parse_quiet(const std::vector<std::string>& args) {
  std::ostringstream log;
  return parse(args, log);
}

int exit_code(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* log_text = nullptr) {
  std::ostringstream out, log;
  const int code = main_entry(args, out, log);
  if (out_text) *out_text = out.str();
  if (log_text) *log_text = log.str();
  return code;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = "laue_cli_test_" + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("parse: algebra suite with a seed") {
  const auto c = parse_quiet({"verify", "algebra", "--seed", "7"});
  CHECK(c.command == "verify");
  CHECK(c.target == "algebra");
  CHECK(c.seed == 7);
}

TEST_CASE("parse: shell report in CSV") {
  const auto c = parse_quiet({"laue", "classical", "--scenario", "coulomb_shell", "--beta", "0.6", "--format", "csv"});
  CHECK(c.scenario == "coulomb_shell");
  REQUIRE(c.betas.size() == 1);
  CHECK(c.betas[0] == 0.6);
  CHECK(c.format == report::Format::csv);
  const auto d = parse_quiet({"laue", "classical", "--scenario", "gaussian_dust", "--beta", "0.3", "--beta", "0.9"});
  CHECK(d.betas == std::vector<double>{0.3, 0.9});
}

TEST_CASE("parse: flag beats config file and the override is logged") {
  const auto path = temp_file("override.ini",
                              "grid_n = 12\nscenario = gaussian_dust\ntol = 0.01\n[scenario.gaussian_dust]\nsigma = 0.7\n"
                              "[coulomb_shell]\nq = 3\n");
  std::ostringstream log;
  const auto c = parse({"laue", "classical", "--config", path, "--grid-n", "20"}, log);
  CHECK(c.grid_n == 20);
  CHECK(c.tol == 0.01);
  CHECK(c.scenario == "gaussian_dust");
  CHECK(c.params.sigma == 0.7);
  CHECK(c.params.q == 1.0);  // section for another scenario
  CHECK(log.str().find("--grid-n") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("parse: usage errors") {
  CHECK_THROWS_AS(parse_quiet({}), UsageError);
  CHECK_THROWS_AS(parse_quiet({"verify"}), UsageError);
  CHECK_THROWS_AS(parse_quiet({"verify", "nonsense"}), UsageError);
  CHECK_THROWS_AS(parse_quiet({"laue", "classical"}), UsageError);
  CHECK_THROWS_AS(parse_quiet({"laue", "classical", "--scenario", "nope"}), UsageError);
  CHECK_THROWS_AS(parse_quiet({"laue", "classical", "--scenario", "gaussian_dust", "--beta", "1.2"}), UsageError);
  CHECK_THROWS_AS(parse_quiet({"verify", "algebra", "--grid-n", "abc"}), UsageError);
  CHECK_THROWS_AS(parse_quiet({"verify", "algebra", "--frobnicate"}), UsageError);
  CHECK_THROWS_AS(parse_quiet({"verify", "algebra", "--format", "xml"}), UsageError);
  CHECK_THROWS_AS(parse_quiet({"scenario", "coulomb_shell", "--param", "qq=2"}), UsageError);
  const auto path = temp_file("unknown.ini", "colour = blue\n");
  CHECK_THROWS_AS(parse_quiet({"verify", "algebra", "--config", path}), UsageError);
  std::remove(path.c_str());
}

TEST_CASE("exit codes") {
  std::string out, log;
  CHECK(exit_code({"verify", "algebra", "--seed", "7"}) == 0);
  CHECK(exit_code({"laue", "classical", "--scenario", "coulomb_shell", "--beta", "0.6", "--grid-n", "24"}, &out) == 1);
  CHECK(out.find("laue_verdict,four_vector,0") != std::string::npos);
  CHECK(out.find("P_boosted_direct,axis1_beta0.6_1") != std::string::npos);
  CHECK(exit_code({"laue", "classical", "--scenario", "completed_shell", "--param", "R_out=0", "--grid-n", "32"}) == 0);
  CHECK(exit_code({"laue", "classical", "--scenario", "moving_dust", "--grid-n", "8"}, nullptr, &log) == 2);
  CHECK(log.find("domain error") != std::string::npos);
  CHECK(exit_code({"bogus"}) == 2);
  CHECK(exit_code({"verify", "poincare", "--out", "/nonexistent-dir/report.csv"}) == 3);
  CHECK(exit_code({"--help"}, &out) == 0);
  CHECK(out.find("laue-lab") != std::string::npos);
}

TEST_CASE("output file equals stdout bytes") {
  std::string direct;
  CHECK(exit_code({"physics", "virial", "--format", "json"}, &direct) == 0);
  const std::string path = "laue_cli_test_out.json";
  CHECK(exit_code({"physics", "virial", "--format", "json", "--out", path}) == 0);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == direct);
  std::remove(path.c_str());
}
