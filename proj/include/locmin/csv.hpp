#pragma once

// Plain CSV output. Reals are written in shortest round-trip form so files
// are bit-reproducible and diffable.

#include "locmin/types.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace locmin {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view stamp,
            const std::vector<std::string>& columns)
      : out_(path), path_(path) {
    if (!out_) throw InvalidInput("cannot write '" + path.string() + "'");
    out_ << stamp;
    write_cells(columns);
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    std::vector<std::string> text;
    (text.push_back(cell(cells)), ...);
    write_cells(text);
  }

  void row_vector(const std::vector<std::string>& cells) { write_cells(cells); }

  const std::filesystem::path& path() const { return path_; }

 private:
  template <class T>
  static std::string cell(const T& v) {
    if constexpr (std::is_same_v<T, bool>) {
      return v ? "1" : "0";
    } else if constexpr (std::is_floating_point_v<T>) {
      return format_number(static_cast<double>(v));
    } else if constexpr (std::is_integral_v<T>) {
      return std::to_string(v);
    } else {
      return std::string(v);
    }
  }

  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw EvaluationError("write failed on '" + path_.string() + "'");
  }

  std::ofstream out_;
  std::filesystem::path path_;
};

// Rows of a CSV file, skipping '#' comment lines and the header row.
inline std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const auto next = line.find(',', pos);
      cells.push_back(line.substr(pos, next == std::string::npos ? next : next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace locmin
