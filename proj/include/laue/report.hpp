#pragma once

#include <optional>
#include <string>
#include <vector>

namespace laue::report {

enum class Verdict { none, pass, fail };

// One line of the output schema.
struct Row {
  std::string quantity;
  std::string component;
  double value = 0.0;
  int grid_N = 0;
  double h = 0.0;
  std::optional<double> refinement_ratio;
  std::optional<double> tolerance;
  Verdict verdict = Verdict::none;
};

struct Report {
  std::string title;
  std::vector<Row> rows;
  std::vector<Row> diagnostics;  // emitted after the main rows
  std::string markdown;          // optional comparison tables for the md format

  void add(Row r) { rows.push_back(std::move(r)); }
  void check(std::string quantity, std::string component, double value, double tol, bool ok, int grid_N = 0,
             double h = 0.0, std::optional<double> ratio = std::nullopt);
  void info(std::string quantity, std::string component, double value, int grid_N = 0, double h = 0.0);
  bool passed() const;
  void append(const Report& other);
};

enum class Format { csv, json, md };
Format parse_format(const std::string& s);

extern const char* const kCsvHeader;

std::string emit(const Report& r, Format f);
// Inverse of emit(r, Format::json).
Report from_json(const std::string& text);

const char* verdict_name(Verdict v);

}  // namespace laue::report
