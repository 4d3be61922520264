#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lqpi {
namespace io {

// 17 significant digits, '.' decimal separator, no locale surprises;
// re-running a config must produce byte-identical numeric content.
std::string format_double(double v);

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);
void write_csv_row(std::ostream& os, const std::vector<double>& cells);

}  // namespace io
}  // namespace lqpi
