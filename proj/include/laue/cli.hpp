#pragma once

#include "laue/report.hpp"
#include "laue/scenarios.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace laue::cli {

struct RunConfig {
  std::string command;  // verify | laue | equivariance | scenario | physics
  std::string target;   // suite, report kind, scenario or physics check
  std::string scenario;
  scenarios::ScenarioParams params;
  std::optional<int> grid_n;
  double box_l = 0.0;  // 0: box chosen from the scenario
  double fd_h = 1e-3;
  std::optional<double> tol;
  std::vector<double> betas{0.3, 0.6, 0.9};
  std::vector<int> axes{1};
  std::uint64_t seed = 7;
  report::Format format = report::Format::csv;
  std::string out;
  bool strict = false;
};

// Thrown by parse for --help; carries the rendered help text.
struct HelpRequested {
  std::string text;
};

// args excludes the program name.  Config-file values lose to flags; each
// such override is written to log.  Throws UsageError on any bad input.
RunConfig parse(const std::vector<std::string>& args, std::ostream& log);

// Builds the report for a validated config.
report::Report execute(const RunConfig& cfg);

// Executes and writes the report; returns the process exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

// parse + run with the exit-code mapping: 0 pass, 1 verdict failed,
// 2 usage or domain error, 3 numeric fault or unwritable output.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace laue::cli
