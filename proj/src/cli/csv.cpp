#include "sparselab/cli/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sparselab::cli {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::logic_error("csv row width does not match header");
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  for (const auto& c : comments) out += "# " + c + "\n";
  line(columns);
  for (const auto& r : rows) line(r);
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << str();
}

}  // namespace sparselab::cli
