#include "laue/report.hpp"

#include "laue/common.hpp"

#include <fmt/format.h>
#include <json.hpp>

namespace laue::report {

namespace {

using ojson = nlohmann::ordered_json;

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void csv_rows(std::string& out, const std::vector<Row>& rows) {
  for (const Row& r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(r.quantity), csv_field(r.component), num(r.value),
                       r.grid_N, num(r.h), opt_num(r.refinement_ratio), opt_num(r.tolerance), verdict_name(r.verdict));
}

ojson row_json(const Row& r) {
  ojson j;
  j["quantity"] = r.quantity;
  j["component"] = r.component;
  j["value"] = r.value;
  j["grid_N"] = r.grid_N;
  j["h"] = r.h;
  j["refinement_ratio"] = r.refinement_ratio ? ojson(*r.refinement_ratio) : ojson(nullptr);
  j["tolerance"] = r.tolerance ? ojson(*r.tolerance) : ojson(nullptr);
  j["verdict"] = verdict_name(r.verdict);
  return j;
}

Row row_from_json(const ojson& j) {
  Row r;
  r.quantity = j.at("quantity").get<std::string>();
  r.component = j.at("component").get<std::string>();
  r.value = j.at("value").get<double>();
  r.grid_N = j.at("grid_N").get<int>();
  r.h = j.at("h").get<double>();
  if (!j.at("refinement_ratio").is_null()) r.refinement_ratio = j.at("refinement_ratio").get<double>();
  if (!j.at("tolerance").is_null()) r.tolerance = j.at("tolerance").get<double>();
  const auto v = j.at("verdict").get<std::string>();
  r.verdict = v == "pass" ? Verdict::pass : v == "fail" ? Verdict::fail : Verdict::none;
  return r;
}

void md_rows(std::string& out, const std::vector<Row>& rows) {
  out += "| quantity | component | value | grid_N | h | refinement_ratio | tolerance | verdict |\n";
  out += "|---|---|---|---|---|---|---|---|\n";
  for (const Row& r : rows)
    out += fmt::format("| {} | {} | {:.10g} | {} | {:.3g} | {} | {} | {} |\n", r.quantity, r.component, r.value, r.grid_N,
                       r.h, r.refinement_ratio ? fmt::format("{:.4g}", *r.refinement_ratio) : "",
                       r.tolerance ? fmt::format("{:.3g}", *r.tolerance) : "", verdict_name(r.verdict));
}

}  // namespace

const char* const kCsvHeader = "quantity,component,value,grid_N,h,refinement_ratio,tolerance,verdict";

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    default:
      return "";
  }
}

void Report::check(std::string quantity, std::string component, double value, double tol, bool ok, int grid_N,
                   double h, std::optional<double> ratio) {
  rows.push_back({std::move(quantity), std::move(component), value, grid_N, h, ratio, tol,
                  ok ? Verdict::pass : Verdict::fail});
}

void Report::info(std::string quantity, std::string component, double value, int grid_N, double h) {
  rows.push_back({std::move(quantity), std::move(component), value, grid_N, h, std::nullopt, std::nullopt, Verdict::none});
}

bool Report::passed() const {
  for (const auto* list : {&rows, &diagnostics})
    for (const Row& r : *list)
      if (r.verdict == Verdict::fail) return false;
  return true;
}

void Report::append(const Report& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  diagnostics.insert(diagnostics.end(), other.diagnostics.begin(), other.diagnostics.end());
  if (!other.markdown.empty()) markdown += other.markdown;
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  if (s == "md") return Format::md;
  throw UsageError("unknown format '" + s + "' (expected csv, json or md)");
}

std::string emit(const Report& r, Format f) {
  switch (f) {
    case Format::csv: {
      std::string out = std::string(kCsvHeader) + "\n";
      csv_rows(out, r.rows);
      csv_rows(out, r.diagnostics);
      return out;
    }
    case Format::json: {
      ojson j;
      j["title"] = r.title;
      j["rows"] = ojson::array();
      for (const Row& row : r.rows) j["rows"].push_back(row_json(row));
      j["diagnostics"] = ojson::array();
      for (const Row& row : r.diagnostics) j["diagnostics"].push_back(row_json(row));
      return j.dump(2) + "\n";
    }
    case Format::md: {
      std::string out = "# " + r.title + "\n\n";
      if (!r.markdown.empty()) out += r.markdown + "\n";
      md_rows(out, r.rows);
      if (!r.diagnostics.empty()) {
        out += "\nDiagnostics\n\n";
        md_rows(out, r.diagnostics);
      }
      return out;
    }
  }
  return {};
}

Report from_json(const std::string& text) {
  const ojson j = ojson::parse(text);
  Report r;
  r.title = j.at("title").get<std::string>();
  for (const auto& row : j.at("rows")) r.rows.push_back(row_from_json(row));
  for (const auto& row : j.at("diagnostics")) r.diagnostics.push_back(row_from_json(row));
  return r;
}

}  // namespace laue::report
