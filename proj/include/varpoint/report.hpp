#pragma once

// Result records and their persistence: CSV (RFC 4180), JSON lines, and static
// SVG plots.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace varpoint {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct ResultRecord {
  std::string experiment;
  std::string family_kind;
  std::string op;                   // operator label, e.g. "variation_r2"
  std::optional<double> r;          // may be +inf
  std::optional<double> lambda;     // jump size for jump operators
  std::optional<double> p;
  std::optional<double> q;
  std::string quantity;             // what `value` measures
  std::optional<double> value;
  std::optional<double> reference;  // the value it is compared against
  std::optional<double> ratio;
  std::string status;               // PASS, FAIL, INFO or SKIP
  std::string witness;              // regenerates the extremal input
  std::optional<double> witness_lambda;
  std::string detail;
  int dim = 0;
  std::size_t grid_extent = 0;
  double grid_spacing = 0.0;
  std::uint64_t seed = 0;
  std::string version = kLibraryVersion;
  double runtime_ms = 0.0;
  std::string series_axes;          // "x_name:y_name"
  std::vector<std::pair<double, double>> series;

  bool operator==(const ResultRecord&) const = default;
};

/// Field order used by both formats.
const std::vector<std::string>& record_columns();

nlohmann::ordered_json to_json(const ResultRecord& rec, bool include_timing = true);
ResultRecord record_from_json(const nlohmann::json& j);

std::string csv_header();
std::string to_csv_row(const ResultRecord& rec, bool include_timing = true);

std::string records_to_jsonl(const std::vector<ResultRecord>& records, bool include_timing = true);
std::string records_to_csv(const std::vector<ResultRecord>& records, bool include_timing = true);

std::vector<ResultRecord> parse_jsonl(const std::string& text);
std::vector<ResultRecord> parse_csv(const std::string& text);
/// Reads .jsonl/.json or .csv by extension.
std::vector<ResultRecord> read_records(const std::string& path);

/// Line plot of a record's series; log scales where the axis is positive.
/// Decay series ("k:...") get a fitted-slope annotation.
std::string svg_plot(const ResultRecord& rec);

/// Writes results.csv or results.jsonl (format "csv" or "json") plus one SVG
/// per record that carries a series. Returns the paths written. Without
/// timing, runtime_ms is written as 0 so reruns are byte-identical.
std::vector<std::string> emit_report(const std::vector<ResultRecord>& records, const std::string& format,
                                     const std::string& dir, bool include_timing = true);

}  // namespace varpoint
