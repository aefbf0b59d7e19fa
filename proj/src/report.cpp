#include "varpoint/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "varpoint/errors.hpp"
#include "varpoint/weaktype.hpp"

namespace varpoint {

namespace {

using Json = nlohmann::ordered_json;

std::string number_text(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return nlohmann::json(x).dump();
}

double parse_number(const std::string& s) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw DomainError("not a number: '" + s + "'");
  return v;
}

Json number_json(const std::optional<double>& x) {
  if (!x) return nullptr;
  if (!std::isfinite(*x)) return number_text(*x);
  return *x;
}

std::optional<double> number_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) return parse_number(j.get<std::string>());
  return j.get<double>();
}

std::string series_text(const std::vector<std::pair<double, double>>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ';';
    out += number_text(s[i].first) + ':' + number_text(s[i].second);
  }
  return out;
}

std::vector<std::pair<double, double>> series_from_text(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw DomainError("malformed series entry '" + item + "'");
    out.emplace_back(parse_number(item.substr(0, colon)), parse_number(item.substr(colon + 1)));
  }
  return out;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw DomainError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

}  // namespace

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "experiment", "family_kind", "operator",   "r",       "lambda",      "p",           "q",
      "quantity",   "value",       "reference",  "ratio",   "status",      "witness",     "witness_lambda",
      "detail",     "dim",         "grid_extent", "grid_spacing", "seed",  "version",     "runtime_ms",
      "series_axes", "series"};
  return cols;
}

Json to_json(const ResultRecord& rec, bool include_timing) {
  Json j;
  j["experiment"] = rec.experiment;
  j["family_kind"] = rec.family_kind;
  j["operator"] = rec.op;
  j["r"] = number_json(rec.r);
  j["lambda"] = number_json(rec.lambda);
  j["p"] = number_json(rec.p);
  j["q"] = number_json(rec.q);
  j["quantity"] = rec.quantity;
  j["value"] = number_json(rec.value);
  j["reference"] = number_json(rec.reference);
  j["ratio"] = number_json(rec.ratio);
  j["status"] = rec.status;
  j["witness"] = rec.witness;
  j["witness_lambda"] = number_json(rec.witness_lambda);
  j["detail"] = rec.detail;
  j["dim"] = rec.dim;
  j["grid_extent"] = rec.grid_extent;
  j["grid_spacing"] = rec.grid_spacing;
  j["seed"] = rec.seed;
  j["version"] = rec.version;
  j["runtime_ms"] = include_timing ? rec.runtime_ms : 0.0;
  j["series_axes"] = rec.series_axes;
  Json series = Json::array();
  for (const auto& [x, y] : rec.series) series.push_back({number_json(x), number_json(y)});
  j["series"] = series;
  return j;
}

ResultRecord record_from_json(const nlohmann::json& j) {
  ResultRecord rec;
  rec.experiment = j.at("experiment").get<std::string>();
  rec.family_kind = j.at("family_kind").get<std::string>();
  rec.op = j.at("operator").get<std::string>();
  rec.r = number_from_json(j.at("r"));
  rec.lambda = number_from_json(j.at("lambda"));
  rec.p = number_from_json(j.at("p"));
  rec.q = number_from_json(j.at("q"));
  rec.quantity = j.at("quantity").get<std::string>();
  rec.value = number_from_json(j.at("value"));
  rec.reference = number_from_json(j.at("reference"));
  rec.ratio = number_from_json(j.at("ratio"));
  rec.status = j.at("status").get<std::string>();
  rec.witness = j.at("witness").get<std::string>();
  rec.witness_lambda = number_from_json(j.at("witness_lambda"));
  rec.detail = j.at("detail").get<std::string>();
  rec.dim = j.at("dim").get<int>();
  rec.grid_extent = j.at("grid_extent").get<std::size_t>();
  rec.grid_spacing = j.at("grid_spacing").get<double>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.version = j.at("version").get<std::string>();
  rec.runtime_ms = j.at("runtime_ms").get<double>();
  rec.series_axes = j.at("series_axes").get<std::string>();
  for (const auto& pt : j.at("series")) {
    rec.series.emplace_back(*number_from_json(pt.at(0)), *number_from_json(pt.at(1)));
  }
  return rec;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : record_columns()) out += (out.empty() ? "" : ",") + c;
  return out;
}

std::string to_csv_row(const ResultRecord& rec, bool include_timing) {
  const auto opt = [](const std::optional<double>& x) { return x ? number_text(*x) : std::string(); };
  const std::vector<std::string> fields = {rec.experiment,
                                           rec.family_kind,
                                           rec.op,
                                           opt(rec.r),
                                           opt(rec.lambda),
                                           opt(rec.p),
                                           opt(rec.q),
                                           rec.quantity,
                                           opt(rec.value),
                                           opt(rec.reference),
                                           opt(rec.ratio),
                                           rec.status,
                                           rec.witness,
                                           opt(rec.witness_lambda),
                                           rec.detail,
                                           std::to_string(rec.dim),
                                           std::to_string(rec.grid_extent),
                                           number_text(rec.grid_spacing),
                                           std::to_string(rec.seed),
                                           rec.version,
                                           number_text(include_timing ? rec.runtime_ms : 0.0),
                                           rec.series_axes,
                                           series_text(rec.series)};
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_quote(fields[i]);
  return out;
}

std::string records_to_jsonl(const std::vector<ResultRecord>& records, bool include_timing) {
  std::string out;
  for (const auto& r : records) out += to_json(r, include_timing).dump() + "\n";
  return out;
}

std::string records_to_csv(const std::vector<ResultRecord>& records, bool include_timing) {
  std::string out = csv_header() + "\r\n";
  for (const auto& r : records) out += to_csv_row(r, include_timing) + "\r\n";
  return out;
}

std::vector<ResultRecord> parse_jsonl(const std::string& text) {
  std::vector<ResultRecord> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

std::vector<ResultRecord> parse_csv(const std::string& text) {
  const auto rows = csv_rows(text);
  if (rows.empty()) throw DomainError("CSV has no header");
  const auto& cols = record_columns();
  if (rows.front() != cols) throw DomainError("CSV header does not match the record columns");
  std::vector<ResultRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != cols.size()) throw DomainError("CSV row " + std::to_string(i) + " has the wrong field count");
    const auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<double>(parse_number(s)); };
    ResultRecord r;
    r.experiment = f[0];
    r.family_kind = f[1];
    r.op = f[2];
    r.r = opt(f[3]);
    r.lambda = opt(f[4]);
    r.p = opt(f[5]);
    r.q = opt(f[6]);
    r.quantity = f[7];
    r.value = opt(f[8]);
    r.reference = opt(f[9]);
    r.ratio = opt(f[10]);
    r.status = f[11];
    r.witness = f[12];
    r.witness_lambda = opt(f[13]);
    r.detail = f[14];
    r.dim = std::stoi(f[15]);
    r.grid_extent = std::stoull(f[16]);
    r.grid_spacing = parse_number(f[17]);
    r.seed = std::stoull(f[18]);
    r.version = f[19];
    r.runtime_ms = parse_number(f[20]);
    r.series_axes = f[21];
    r.series = series_from_text(f[22]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ResultRecord> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv") return parse_csv(buf.str());
  return parse_jsonl(buf.str());
}

std::string svg_plot(const ResultRecord& rec) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
  const auto colon = rec.series_axes.find(':');
  const std::string xname = colon == std::string::npos ? "x" : rec.series_axes.substr(0, colon);
  const std::string yname = colon == std::string::npos ? "y" : rec.series_axes.substr(colon + 1);
  const bool decay = xname == "k";

  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, y] : rec.series) {
    if (std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
  }
  const bool logx = !decay && !pts.empty() && std::all_of(pts.begin(), pts.end(), [](auto& p) { return p.first > 0; });
  const bool logy = !pts.empty() && std::all_of(pts.begin(), pts.end(), [](auto& p) { return p.second > 0; });
  const auto tx = [&](double x) { return logx ? std::log2(x) : x; };
  const auto ty = [&](double y) { return logy ? std::log2(y) : y; };

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = tx(pts[0].first);
    y0 = y1 = ty(pts[0].second);
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  }
  if (x1 - x0 < 1e-12) {
    x0 -= 1;
    x1 += 1;
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 1;
    y1 += 1;
  }
  const auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::string title = rec.experiment + " " + rec.quantity;
  if (!rec.op.empty()) title += " " + rec.op;
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << xml_escape(title) << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double fy = y0 + (y1 - y0) * i / 4.0;
    const double sx = L + (W - L - R) * i / 4.0;
    const double sy = H - B - (H - T - B) * i / 4.0;
    s << "<text x=\"" << sx << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << xml_escape(fmt(logx ? std::exp2(fx) : fx, 3)) << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << xml_escape(fmt(logy ? std::exp2(fy) : fy, 3)) << "</text>\n";
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << xml_escape(xname + (logx ? " (log scale)" : "")) << "</text>\n";
  s << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << xml_escape(yname + (logy ? " (log scale)" : "")) << "</text>\n";
  if (!pts.empty()) {
    s << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) s << fmt(px(x), 6) << ',' << fmt(py(y), 6) << ' ';
    s << "\"/>\n";
    for (const auto& [x, y] : pts) {
      s << "<circle cx=\"" << fmt(px(x), 6) << "\" cy=\"" << fmt(py(y), 6) << "\" r=\"3\" fill=\"#1f5fa8\"/>\n";
    }
  }
  if (decay && logy && pts.size() >= 2) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [x, y] : pts) {
      xs.push_back(x);
      ys.push_back(std::log2(y));
    }
    s << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">fitted slope (log2 per k) = "
      << xml_escape(fmt(fit_slope(xs, ys), 4)) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::string> emit_report(const std::vector<ResultRecord>& records, const std::string& format,
                                     const std::string& dir, bool include_timing) {
  if (records.empty()) throw DomainError("emit_report: no records");
  if (format != "csv" && format != "json") throw DomainError("emit_report: format must be csv or json");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);

  std::vector<std::string> written;
  const auto write = [&](const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
    if (!out) throw IoError("write failed for " + path.string());
    written.push_back(path.string());
  };
  if (format == "csv") {
    write(fs::path(dir) / "results.csv", records_to_csv(records, include_timing));
  } else {
    write(fs::path(dir) / "results.jsonl", records_to_jsonl(records, include_timing));
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].series.empty()) continue;
    std::ostringstream name;
    name << "plot_" << i << "_" << sanitize(records[i].quantity) << (records[i].op.empty() ? "" : "_")
         << sanitize(records[i].op) << ".svg";
    write(fs::path(dir) / name.str(), svg_plot(records[i]));
  }
  return written;
}

}  // namespace varpoint
