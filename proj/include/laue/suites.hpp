#pragma once

#include "laue/laue_checkers.hpp"
#include "laue/report.hpp"
#include "laue/scenarios.hpp"

#include <cstdint>
#include <optional>
#include <vector>

// Property suites and theorem reports as emit-ready tables.  Every verdict
// row carries the tolerance it was judged against.
namespace laue::suites {

report::Report algebra(std::uint64_t seed, int random_count = 500);
report::Report poincare(std::uint64_t seed, int random_count = 200);

// Field identities on a smooth conserved tensor, at h and h/2.
report::Report identities(double h = 1e-3);

// Flat recovery case at (N, h) and (2N, h/2); curved exact-current case at (N/2, h) and (N, h/2).
report::Report geometric(int N = 64, double h = 1e-3);

report::Report conservation(int N = 64, double h = 1e-3);

struct LaueSettings {
  std::vector<double> betas{0.3, 0.6, 0.9};
  std::vector<int> axes{1};
  int grid_n = 64;
  double tol = 1e-3;
  bool strict = false;
};
report::Report to_report(const checks::LaueReport& r, const std::string& title);
report::Report laue_classical(const scenarios::Scenario& s, const LaueSettings& opt);

report::Report laue_fake(const scenarios::Scenario& s, int grid_n, std::uint64_t seed, double tol = 1e-6);

// half_width = 0 picks a box around the scenario's support.
report::Report laue_gauss(const std::optional<scenarios::Scenario>& s, int grid_n, double half_width, double h,
                          double tol = 1e-6);

// Seeded boost * rotation * translation elements.
std::vector<poincare::PoincareElement> random_elements(std::uint64_t seed, int count);

struct EquivarianceSettings {
  int grid_n = 48;
  int count = 5;
  double tol = 1e-2;
  std::uint64_t seed = 7;
  Vec origin;  // empty: (0, 0.1, -0.2, 0.05)
};
report::Report equivariance(const scenarios::ScenarioParams& params, const EquivarianceSettings& opt);

report::Report scenario_summary(const scenarios::Scenario& s, int grid_n, double h);

report::Report physics(const std::string& which, const scenarios::ScenarioParams& params, int grid_n,
                       double tol = 1e-3);

}  // namespace laue::suites
