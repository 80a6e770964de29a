#include "relucond/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace relucond {

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

// Numbers stay numbers; inf/nan become strings so the JSON stays valid.
std::string json_number(double v) {
  if (std::isinf(v) || std::isnan(v)) return "\"" + fmt_double(v) + "\"";
  return fmt_double(v);
}

}  // namespace

std::string to_json(const RunReport& report) {
  std::string out = "{\n  \"command\": \"" + json_escape(report.command) + "\",\n";
  out += "  \"config\": {";
  for (std::size_t i = 0; i < report.config.size(); ++i) {
    if (i) out += ",";
    out += "\n    \"" + json_escape(report.config[i].first) + "\": \"" +
           json_escape(report.config[i].second) + "\"";
  }
  out += "\n  },\n  \"results\": [";
  for (std::size_t r = 0; r < report.results.rows.size(); ++r) {
    if (r) out += ",";
    out += "\n    {";
    const ReportRow& row = report.results.rows[r];
    bool first = true;
    if (!row.label.empty()) {
      out += "\"row\": \"" + json_escape(row.label) + "\"";
      first = false;
    }
    for (const auto& [k, v] : row.values) {
      if (!first) out += ", ";
      first = false;
      out += "\"" + json_escape(k) + "\": " + json_number(v);
    }
    out += "}";
  }
  out += "\n  ],\n  \"runtime_ms\": " + json_number(report.runtime_ms) + "\n}\n";
  return out;
}

std::string to_csv(const RunReport& report) {
  std::string out = "# command: " + report.command + "\n";
  for (const auto& [k, v] : report.config) out += "# " + k + ": " + v + "\n";

  // Union of keys in first-seen order; rows missing a key leave the cell empty.
  std::vector<std::string> columns;
  std::set<std::string> seen;
  bool any_label = false;
  for (const ReportRow& row : report.results.rows) {
    if (!row.label.empty()) any_label = true;
    for (const auto& [k, v] : row.values)
      if (seen.insert(k).second) columns.push_back(k);
  }

  if (any_label) out += "row,";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ",";
    out += columns[i];
  }
  out += "\n";
  for (const ReportRow& row : report.results.rows) {
    if (any_label) out += row.label + ",";
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ",";
      if (row.has(columns[i])) out += fmt_double(row.get(columns[i]));
    }
    out += "\n";
  }
  out += "# runtime_ms: " + fmt_double(report.runtime_ms) + "\n";
  return out;
}

Matrix parse_matrix(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  auto fail = [&](const std::string& what) -> void {
    throw InputError(origin + ":" + std::to_string(lineno) + ": " + what);
  };

  if (!std::getline(in, line)) {
    lineno = 1;
    fail("empty file, expected header 'm n'");
  }
  lineno = 1;
  std::istringstream header(line);
  long long m = 0, n = 0;
  if (!(header >> m >> n) || m < 1 || n < 1) fail("malformed header, expected 'm n'");
  std::string extra;
  if (header >> extra) fail("trailing tokens after 'm n'");

  Matrix a(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  for (long long i = 0; i < m; ++i) {
    if (!std::getline(in, line)) {
      ++lineno;
      fail("expected " + std::to_string(m) + " rows, file ended after " + std::to_string(i));
    }
    ++lineno;
    std::istringstream row(line);
    for (long long j = 0; j < n; ++j) {
      double v;
      if (!(row >> v)) fail("expected " + std::to_string(n) + " entries in row");
      if (!std::isfinite(v)) fail("non-finite entry");
      a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
    }
    if (row >> extra) fail("trailing tokens after " + std::to_string(n) + " entries");
  }
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream rest(line);
    if (rest >> extra) fail("unexpected extra row");
  }
  return a;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open matrix file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_matrix(buf.str(), path);
}

void write_matrix_file(const std::string& path, const Matrix& a) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write matrix file: " + path);
  f << a.rows << " " << a.cols << "\n";
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (j) f << " ";
      f << fmt_double(a(i, j));
    }
    f << "\n";
  }
}

}  // namespace relucond
