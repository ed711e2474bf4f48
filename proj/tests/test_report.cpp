#include "doctest.h"

#include "laue/laue_checkers.hpp"
#include "laue/report.hpp"
#include "laue/scenarios.hpp"
#include "laue/suites.hpp"

#include <sstream>

using namespace laue;
using namespace laue::report;

namespace {

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

bool same_row(const Row& a, const Row& b) {
  return a.quantity == b.quantity && a.component == b.component && a.value == b.value && a.grid_N == b.grid_N &&
         a.h == b.h && a.refinement_ratio == b.refinement_ratio && a.tolerance == b.tolerance && a.verdict == b.verdict;
}

}  // namespace

TEST_CASE("empty report is a header-only CSV") {
  Report r;
  CHECK(emit(r, Format::csv) == std::string(kCsvHeader) + "\n");
  CHECK(std::string(kCsvHeader) == "quantity,component,value,grid_N,h,refinement_ratio,tolerance,verdict");
  CHECK(r.passed());
}

TEST_CASE("classical Laue report has 4 + 4 + 4 + 9 rows plus the verdict") {
  const auto s = scenarios::build("gaussian_dust");
  suites::LaueSettings opt;
  opt.betas = {0.6};
  opt.grid_n = 16;
  const Report r = suites::laue_classical(s, opt);
  CHECK(r.rows.size() == 22);
  CHECK(r.rows.back().quantity == "laue_verdict");
  std::size_t direct = 0, predicted = 0, fv = 0, stress = 0;
  for (const auto& row : r.rows) {
    direct += row.quantity == "P_boosted_direct";
    predicted += row.quantity == "P_boosted_predicted";
    fv += row.quantity == "P_fourvector";
    stress += row.quantity == "stress_integral";
  }
  CHECK(direct == 4);
  CHECK(predicted == 4);
  CHECK(fv == 4);
  CHECK(stress == 9);
  CHECK(count_lines(emit(r, Format::csv)) == 1 + 22 + static_cast<int>(r.diagnostics.size()));
  const std::string md = emit(r, Format::md);
  CHECK(md.find("four-vector law") != std::string::npos);
  CHECK(md.find("| T11 |") != std::string::npos);
}

TEST_CASE("JSON round trip is lossless") {
  Report r;
  r.title = "round, \"trip\"";
  r.check("a,b", "c\"d", 1.0 / 3.0, 1e-12, true, 64, 0.015625, 4.000000001);
  r.check("x", "y", -2.5e-300, 0.1, false);
  r.info("z", "w", 0.1 + 0.2, 7, 1e-3);
  r.diagnostics.push_back({"diag", "0", 6.02214076e23, 0, 0.0, std::nullopt, 3.0, Verdict::pass});
  const Report back = from_json(emit(r, Format::json));
  CHECK(back.title == r.title);
  REQUIRE(back.rows.size() == r.rows.size());
  REQUIRE(back.diagnostics.size() == r.diagnostics.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(same_row(back.rows[i], r.rows[i]));
  CHECK(same_row(back.diagnostics[0], r.diagnostics[0]));
  CHECK(emit(back, Format::json) == emit(r, Format::json));
}

TEST_CASE("CSV quoting and verdict bookkeeping") {
  Report r;
  r.check("q,1", "c", 1.0, 0.5, true);
  const std::string csv = emit(r, Format::csv);
  CHECK(csv.find("\"q,1\",c,1,0,0,,0.5,pass") != std::string::npos);
  CHECK(r.passed());
  r.diagnostics.push_back({"split", "flag", 1.0, 0, 0.0, std::nullopt, 0.0, Verdict::fail});
  CHECK_FALSE(r.passed());
  CHECK_THROWS_AS(parse_format("xml"), UsageError);
}

TEST_CASE("emission is byte-identical across runs") {
  const auto s = scenarios::build("coulomb_shell");
  suites::LaueSettings opt;
  opt.betas = {0.3};
  opt.grid_n = 16;
  const std::string a = emit(suites::laue_classical(s, opt), Format::csv);
  const std::string b = emit(suites::laue_classical(s, opt), Format::csv);
  CHECK(a == b);
}
