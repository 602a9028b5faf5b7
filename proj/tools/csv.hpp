#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "starwave/errors.hpp"

namespace starwave::cli {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quoted(std::string s) {
  for (auto& ch : s)
    if (ch == '"') ch = '\'';
  return "\"" + s + "\"";
}

/// CSV file: a comment line with the config hash, a header, then rows.
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& hash, const std::string& command,
          const std::vector<std::string>& columns)
      : out_(path), width_(columns.size()) {
    if (!out_) throw NumericalError("cannot write " + path.string());
    out_ << "# config_hash=" << hash << " command=" << command << "\n";
    row(columns);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  std::size_t width_;
};

}  // namespace starwave::cli
