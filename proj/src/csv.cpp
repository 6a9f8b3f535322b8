#include "tcpwin/csv.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace tcpwin {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void CurveTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument("CurveTable::add_row: wrong column count");
  }
  rows.push_back(std::move(row));
}

void CurveTable::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i != 0) out << ',';
    out << columns[i];
  }
  out << '\n';
  for (const std::vector<double>& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != 0) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

}  // namespace tcpwin
