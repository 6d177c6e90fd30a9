#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

struct Row {
  std::string name;
  std::string inputs;
  double value = 0.0;
  std::string oracle;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(' ');
  const auto e = s.find_last_not_of(' ');
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline std::vector<Row> load(const std::string& path = std::string(GSQ_FIXTURE_DIR) + "/oracle_values.txt") {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<Row> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
      const auto bar = line.find('|', start);
      parts.push_back(trim(line.substr(start, bar - start)));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    if (parts.size() != 4) throw std::runtime_error("malformed fixture line: " + line);
    rows.push_back({parts[0], parts[1], std::stod(parts[2]), parts[3]});
  }
  return rows;
}

/// Value stored under (name, inputs).
inline double value(const std::vector<Row>& rows, const std::string& name, const std::string& inputs) {
  for (const auto& r : rows)
    if (r.name == name && r.inputs == inputs) return r.value;
  throw std::runtime_error("no fixture " + name + " | " + inputs);
}

inline std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && s[pos] == ' ') ++pos;
    if (pos >= s.size()) break;
    const auto end = s.find(' ', pos);
    const std::string tok = s.substr(pos, end - pos);
    const auto slash = tok.find('/');
    if (slash != std::string::npos)
      out.push_back(std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1)));
    else
      out.push_back(std::stod(tok));
    if (end == std::string::npos) break;
    pos = end;
  }
  return out;
}

}  // namespace fixtures
