#pragma once

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfpinn {

// Shortest representation that parses back to the same double, so emitted
// files round-trip byte-identically.
inline std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("csv: no column named " + name);
  }
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header, bool append = false)
      : out_(path, append ? std::ios::app : std::ios::trunc), cols_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path);
    if (!append || out_.tellp() == 0) write_row(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw std::invalid_argument("csv: wrong cell count");
    write_row(cells);
  }

 private:
  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::size_t cols_;
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

inline void write_csv(const std::string& path, const CsvTable& table) {
  CsvWriter w(path, table.header);
  for (const auto& r : table.rows) w.row(r);
}

}  // namespace sfpinn
