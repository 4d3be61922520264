#pragma once

#include <stdexcept>

namespace lqpi {

/// Uniform time grid on [t0, T] with n_steps intervals.
struct TimeGrid {
  double t0 = 0.0;
  double T = 1.0;
  int n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double t0_, double T_, int n_steps_) : t0(t0_), T(T_), n_steps(n_steps_) {
    if (!(t0 < T)) throw std::invalid_argument("TimeGrid: require t0 < T");
    if (n_steps < 1) throw std::invalid_argument("TimeGrid: require n_steps >= 1");
  }

  double h() const { return (T - t0) / n_steps; }
  int size() const { return n_steps + 1; }

  // t(n_steps) == T exactly; interior nodes strictly increasing.
  double t(int i) const { return i == n_steps ? T : t0 + i * h(); }

  bool operator==(const TimeGrid& o) const {
    return t0 == o.t0 && T == o.T && n_steps == o.n_steps;
  }
};

}  // namespace lqpi
