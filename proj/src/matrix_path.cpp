#include "lqpi/matrix_path.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "lqpi/io.hpp"

namespace lqpi {

MatrixPath::MatrixPath(TimeGrid grid, int rows, int cols, bool symmetric)
    : grid_(grid), rows_(rows), cols_(cols), symmetric_(symmetric) {
  values_.assign(static_cast<std::size_t>(grid.size()), Matrix::Zero(rows, cols));
}

Matrix MatrixPath::eval(double t) const {
  if (values_.empty()) throw std::logic_error("MatrixPath: empty");
  if (t <= grid_.t0) return values_.front();
  if (t >= grid_.T) return values_.back();
  const double pos = (t - grid_.t0) / grid_.h();
  int i = static_cast<int>(std::floor(pos));
  i = std::clamp(i, 0, grid_.n_steps - 1);
  const double w = pos - i;
  if (w == 0.0) return values_[static_cast<std::size_t>(i)];
  return (1.0 - w) * values_[static_cast<std::size_t>(i)] +
         w * values_[static_cast<std::size_t>(i + 1)];
}

double MatrixPath::max_diff(const MatrixPath& other) const {
  if (!(grid_ == other.grid_) || rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("MatrixPath::max_diff: shape/grid mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    d = std::max(d, (values_[i] - other.values_[i]).cwiseAbs().maxCoeff());
  return d;
}

void MatrixPath::write_csv(std::ostream& os) const {
  std::vector<std::string> header{"t"};
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      header.push_back("m" + std::to_string(r) + std::to_string(c));
  io::write_csv_row(os, header);
  for (int i = 0; i < grid_.size(); ++i) {
    std::vector<double> row{grid_.t(i)};
    const Matrix& M = values_[static_cast<std::size_t>(i)];
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) row.push_back(M(r, c));
    io::write_csv_row(os, row);
  }
}

}  // namespace lqpi
