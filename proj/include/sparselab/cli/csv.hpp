#pragma once

#include <string>
#include <vector>

namespace sparselab::cli {

/// 12 significant digits, shortest form.
std::string format_number(double x);

/// Comma-separated table preceded by `#` comment lines; LF line endings.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string str() const;
  void write(const std::string& path) const;
};

}  // namespace sparselab::cli
