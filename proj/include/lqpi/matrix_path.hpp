#pragma once

#include <iosfwd>
#include <vector>

#include "lqpi/grid.hpp"
#include "lqpi/linalg.hpp"

namespace lqpi {

// Matrix-valued function stored on a time grid, one value per node.
class MatrixPath {
 public:
  MatrixPath() = default;
  MatrixPath(TimeGrid grid, int rows, int cols, bool symmetric = false);

  const TimeGrid& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool symmetric_flag() const { return symmetric_; }

  Matrix& at(int i) { return values_[static_cast<std::size_t>(i)]; }
  const Matrix& at(int i) const { return values_[static_cast<std::size_t>(i)]; }
  const Matrix& terminal() const { return values_.back(); }

  // linear interpolation between nodes, clamped to [t0, T]
  Matrix eval(double t) const;

  // max over nodes of the max-norm difference (grids must match)
  double max_diff(const MatrixPath& other) const;

  // CSV: header, then one line per node: t, row-major entries
  void write_csv(std::ostream& os) const;

 private:
  TimeGrid grid_;
  int rows_ = 0, cols_ = 0;
  bool symmetric_ = false;
  std::vector<Matrix> values_;
};

}  // namespace lqpi
