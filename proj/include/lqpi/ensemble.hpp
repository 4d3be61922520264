#pragma once

#include <cstdint>
#include <vector>

#include "lqpi/grid.hpp"
#include "lqpi/rng.hpp"

namespace lqpi {

// Seeded ensemble of Brownian increments on a grid. Increments are computed
// on demand from a counter-based generator keyed by (seed, path, step,
// which-noise): path i is identical regardless of K, and regeneration with
// the same seed is bit-exact.
class PathEnsemble {
 public:
  PathEnsemble() = default;
  PathEnsemble(TimeGrid grid, int K, std::uint64_t seed);

  const TimeGrid& grid() const { return grid_; }
  int paths() const { return K_; }
  std::uint64_t seed() const { return seed_; }

  double dW1(int path, int step) const {
    return sqrt_h_ * rng::normal(seed_, static_cast<std::uint64_t>(path),
                                 static_cast<std::uint64_t>(step), 0);
  }
  double dW2(int path, int step) const {
    return sqrt_h_ * rng::normal(seed_, static_cast<std::uint64_t>(path),
                                 static_cast<std::uint64_t>(step), 1);
  }

  // W2 levels at all nodes for one path (size n_steps + 1, starts at 0)
  void w2_levels(int path, std::vector<double>& out) const;

  // K x (n_steps + 1) row-major table of W2 levels
  std::vector<double> materialize_w2() const;

 private:
  TimeGrid grid_;
  int K_ = 0;
  std::uint64_t seed_ = 0;
  double sqrt_h_ = 0.0;
};

PathEnsemble sample_ensemble(const TimeGrid& grid, int K, std::uint64_t seed);

}  // namespace lqpi
