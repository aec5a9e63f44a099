#pragma once

// Minimal strict CSV support. The file formats used here are plain
// comma-separated tables with a header row, UTF-8, '.' decimal separator,
// no quoting or embedded commas. Parsing is strict: a malformed cell is an
// error naming the line, never a silently skipped row.

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "istrate/common.hpp"

namespace istrate {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // row cells, header-aligned
  std::vector<size_t> line_numbers;            // 1-based source line per row

  int column(const std::string& name) const {
    for (size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return static_cast<int>(j);
    return -1;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file: " + path);
  CsvTable t;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw DataError("parse error at line " + std::to_string(lineno) +
                      " of " + path + ": expected " +
                      std::to_string(t.header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(lineno);
  }
  if (t.header.empty()) throw DataError("empty CSV file: " + path);
  return t;
}

inline double parse_double_cell(const std::string& cell, size_t lineno,
                                const std::string& col) {
  if (cell.empty())
    throw DataError("parse error at line " + std::to_string(lineno) +
                    ": empty value in column '" + col + "'");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v))
    throw DataError("parse error at line " + std::to_string(lineno) +
                    ": '" + cell + "' is not a finite number in column '" +
                    col + "'");
  return v;
}

inline long parse_int_cell(const std::string& cell, size_t lineno,
                           const std::string& col) {
  if (cell.empty())
    throw DataError("parse error at line " + std::to_string(lineno) +
                    ": empty value in column '" + col + "'");
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(cell.c_str(), &end, 10);
  if (end != cell.c_str() + cell.size() || errno == ERANGE)
    throw DataError("parse error at line " + std::to_string(lineno) + ": '" +
                    cell + "' is not an integer in column '" + col + "'");
  return v;
}

// Writer with a fixed formatting path so identical inputs give identical
// bytes.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw IoError("cannot write CSV file: " + path);
  }

  void row(const std::vector<std::string>& cells) {
    for (size_t j = 0; j < cells.size(); ++j) {
      if (j) out_ << ',';
      out_ << cells[j];
    }
    out_ << '\n';
  }

  std::ostream& stream() { return out_; }

 private:
  std::ofstream out_;
};

}  // namespace istrate
