#pragma once

// Flat-file output: CSV with leading "# key=value" metadata lines, and a JSON
// mirror. Reals are written with 17 significant digits so that reading a file
// back and writing it again reproduces it byte for byte.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gsq/errors.hpp"

namespace gsq::io {

inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_real(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') detail::raise_domain("parse_real", "not a number: '" + s + "'");
  return v;
}

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
  void add_meta(std::string key, double value) { meta.emplace_back(std::move(key), format_real(value)); }
  void add_row(const std::vector<double>& values) {
    std::vector<std::string> r;
    r.reserve(values.size());
    for (double v : values) r.push_back(format_real(v));
    rows.push_back(std::move(r));
  }
  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    detail::raise_domain("Table::column", "no column named " + name);
  }
  std::vector<double> numeric_column(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(parse_real(r.at(c)));
    return out;
  }
  const std::string* find_meta(const std::string& key) const {
    for (const auto& [k, v] : meta)
      if (k == key) return &v;
    return nullptr;
  }
};

inline void write_csv(std::ostream& os, const Table& t) {
  for (const auto& [k, v] : t.meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    if (r.size() != t.columns.size()) detail::raise_domain("write_csv", "row width does not match header");
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
}

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!header && line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) detail::raise_domain("read_csv", "metadata line without '='");
      t.meta.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    if (!header) {
      t.columns = split_commas(line);
      header = true;
      continue;
    }
    auto r = split_commas(line);
    if (r.size() != t.columns.size()) detail::raise_domain("read_csv", "row width does not match header");
    t.rows.push_back(std::move(r));
  }
  if (!header) detail::raise_domain("read_csv", "missing header row");
  return t;
}

/// Cells that parse as reals become JSON numbers (NaN becomes null); the
/// rest stay strings.
inline nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) j["metadata"][k] = v;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (const auto& cell : r) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell == "nan")
        row.push_back(nullptr);
      else if (!cell.empty() && end != cell.c_str() && *end == '\0')
        row.push_back(v);
      else
        row.push_back(cell);
    }
    j["rows"].push_back(std::move(row));
  }
  return j;
}

}  // namespace gsq::io
