#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "varpoint/errors.hpp"
#include "varpoint/report.hpp"

using namespace varpoint;

namespace {

ResultRecord sample_record() {
  ResultRecord r;
  r.experiment = "smoothing";
  r.family_kind = "heat";
  r.op = "variation_rinf";
  r.r = INFINITY;
  r.p = 2.0;
  r.quantity = "decay";
  r.value = 0.1 + 0.2;
  r.reference = 1e-300;
  r.status = "PASS";
  r.witness = "simple_functions:1:7";
  r.detail = "note, with \"quotes\"\nand a newline";
  r.dim = 1;
  r.grid_extent = 4096;
  r.grid_spacing = 1.0 / 64;
  r.seed = 18446744073709551615ull;
  r.runtime_ms = 12.5;
  r.series_axes = "k:decay";
  r.series = {{0, 0.9}, {1, 0.4}, {2, 0.05}};
  return r;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  bool in_quotes = false;
  for (char c : s) {
    if (c == '"') in_quotes = !in_quotes;
    if (c == '\n' && !in_quotes) ++n;
  }
  return n;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("one record gives a two-line CSV") {
  const auto csv = records_to_csv({sample_record()});
  CHECK(count_lines(csv) == 2);
  CHECK(csv.rfind(csv_header(), 0) == 0);
}

TEST_CASE("JSON lines round-trip exactly") {
  ResultRecord bare;
  bare.quantity = "x";
  bare.status = "INFO";
  const std::vector<ResultRecord> recs{sample_record(), bare};
  CHECK(parse_jsonl(records_to_jsonl(recs)) == recs);
}

TEST_CASE("CSV round-trips exactly") {
  const std::vector<ResultRecord> recs{sample_record()};
  CHECK(parse_csv(records_to_csv(recs)) == recs);
}

TEST_CASE("timing can be left out") {
  auto a = sample_record();
  auto b = sample_record();
  b.runtime_ms = 99.0;
  CHECK(records_to_csv({a}, false) == records_to_csv({b}, false));
  CHECK(records_to_jsonl({a}, false) == records_to_jsonl({b}, false));
  CHECK(records_to_csv({a}, true) != records_to_csv({b}, true));
}

TEST_CASE("columns match the header") {
  const auto& cols = record_columns();
  CHECK(cols.front() == "experiment");
  const auto j = to_json(sample_record());
  CHECK(j.size() == cols.size());
}

TEST_CASE("svg plot has a root element and a slope note for decay series") {
  const auto svg = svg_plot(sample_record());
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("slope") != std::string::npos);
  CHECK(svg.find("\"quotes\"") == std::string::npos);
}

TEST_CASE("emit_report writes results and plots") {
  const auto dir = std::filesystem::temp_directory_path() / "varpoint_report_test";
  std::filesystem::remove_all(dir);
  const auto written = emit_report({sample_record()}, "json", dir.string());
  CHECK(written.size() == 2);
  CHECK(std::filesystem::exists(dir / "results.jsonl"));
  CHECK(read_records((dir / "results.jsonl").string()).front() == sample_record());
  const auto again = emit_report({sample_record()}, "csv", dir.string(), false);
  CHECK(slurp(dir / "results.csv").find("12.5") == std::string::npos);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(emit_report({}, "csv", dir.string()), DomainError);
  CHECK_THROWS_AS(emit_report({sample_record()}, "csv", "/proc/varpoint_cannot_write"), IoError);
}
