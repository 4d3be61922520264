#include "lqpi/io.hpp"

#include <cstdio>
#include <ostream>

namespace lqpi {
namespace io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

void write_csv_row(std::ostream& os, const std::vector<double>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << format_double(cells[i]);
  }
  os << '\n';
}

}  // namespace io
}  // namespace lqpi
