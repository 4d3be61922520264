#include "lqpi/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace lqpi {

PathEnsemble::PathEnsemble(TimeGrid grid, int K, std::uint64_t seed)
    : grid_(grid), K_(K), seed_(seed), sqrt_h_(std::sqrt(grid.h())) {
  if (K < 1) throw std::invalid_argument("PathEnsemble: K >= 1 required");
}

void PathEnsemble::w2_levels(int path, std::vector<double>& out) const {
  out.resize(static_cast<std::size_t>(grid_.size()));
  out[0] = 0.0;
  for (int i = 0; i < grid_.n_steps; ++i) out[static_cast<std::size_t>(i + 1)] = out[static_cast<std::size_t>(i)] + dW2(path, i);
}

std::vector<double> PathEnsemble::materialize_w2() const {
  const int nodes = grid_.size();
  std::vector<double> table(static_cast<std::size_t>(K_) * nodes);
  std::vector<double> buf;
  for (int p = 0; p < K_; ++p) {
    w2_levels(p, buf);
    for (int i = 0; i < nodes; ++i) table[static_cast<std::size_t>(p) * nodes + i] = buf[static_cast<std::size_t>(i)];
  }
  return table;
}

PathEnsemble sample_ensemble(const TimeGrid& grid, int K, std::uint64_t seed) {
  return PathEnsemble(grid, K, seed);
}

}  // namespace lqpi
