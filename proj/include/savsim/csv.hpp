#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "savsim/common.hpp"

namespace savsim {

/// Minimal CSV support for the comma-separated tables this project exchanges.
/// Fields never contain commas or quotes, so no escaping is implemented.
namespace csv {

inline std::vector<std::string> split_line(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }

  int require_column(const std::string& name, const std::string& file) const {
    int c = column(name);
    if (c < 0) throw ConfigError(file + ": missing column '" + name + "'");
    return c;
  }
};

inline Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_line(line);
    if (first) {
      t.header = fields;
      first = false;
    } else {
      t.rows.push_back(fields);
    }
  }
  return t;
}

inline void write_file(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

inline double to_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value '" + s + "' in " + context);
  }
}

inline long to_long(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value '" + s + "' in " + context);
  }
}

}  // namespace csv
}  // namespace savsim
