#ifndef TCPWIN_CSV_HPP
#define TCPWIN_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace tcpwin {

// Decimal representation with 17 significant digits (round-trip exact for
// IEEE doubles). All CSV artifacts use this.
std::string format_double(double value);

// A plot-ready table: named columns, rows of doubles.
struct CurveTable {
  std::string name;  // artifact file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  void write_csv(std::ostream& out) const;  // header row + data rows
};

}  // namespace tcpwin

#endif  // TCPWIN_CSV_HPP
