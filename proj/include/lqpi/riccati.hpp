#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lqpi/matrix_path.hpp"
#include "lqpi/problem.hpp"

namespace lqpi {

struct IntegratorOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  double cap = 1e12;     // blow-up magnitude cap
  bool adaptive = true;  // substep between grid nodes when the error estimate demands it
};

class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(double t)
      : std::runtime_error("matrix ODE blow-up at t = " + std::to_string(t)), t_star(t) {}
  double t_star;
};

// Classical RK4 on reversed time from grid.T down to grid.t0, storing node
// values. In adaptive mode each grid interval is crossed with step-doubling
// error control; project (when set) is applied after every accepted step.
MatrixPath integrate_backward(const std::function<Matrix(double, const Matrix&)>& rhs,
                              const TimeGrid& grid, const Matrix& terminal, bool symmetric,
                              const IntegratorOptions& opts = {},
                              const std::function<void(Matrix&)>& project = {});

// Instantaneous right-hand sides shared by the solvers below and by the
// adjoint ODE machinery.
Matrix p1_rhs(const ProblemSpec& spec, double t, const Matrix& P1);
Matrix p2_rhs(const ProblemSpec& spec, double t, const Matrix& P1, const Matrix& P2, double epsilon);

struct GainBlocks {
  Matrix K;  // R + eps I + D1' P1 D1 + D2' P2 D2
  Matrix L;  // B' P2 + D1' P1 C1 + D2' P2 C2 + S
};
GainBlocks gain_blocks(const ProblemSpec& spec, double t, const Matrix& P1, const Matrix& P2,
                       double epsilon);

MatrixPath solve_p1(const ProblemSpec& spec, const TimeGrid& grid,
                    const IntegratorOptions& opts = {});

struct P2Solution {
  MatrixPath path;
  // eps = 0 only: node times where the pseudoinverse rank decision changed
  std::vector<double> singular_block_times;
};

// eps = 0 integrates the pseudoinverse form; eps > 0 the perturbed equation
// with the true inverse. P1 is re-integrated jointly so substep values are
// exact to tolerance rather than interpolated.
P2Solution solve_p2(const ProblemSpec& spec, const MatrixPath& p1, const TimeGrid& grid,
                    double epsilon, const IntegratorOptions& opts = {});

// Lyapunov pair for a fixed feedback gain theta (m x n path).
std::pair<MatrixPath, MatrixPath> solve_lyapunov_pair(const ProblemSpec& spec,
                                                      const MatrixPath& theta,
                                                      const TimeGrid& grid,
                                                      const IntegratorOptions& opts = {});

struct PositivityCheck {
  double gamma_hat = 0.0;
  bool ok = false;
};

// min over grid nodes of the smallest eigenvalue of
// R + eps I + D1' P1 D1 + D2' P2 D2.
PositivityCheck check_uniform_positivity(const ProblemSpec& spec, const MatrixPath& p1,
                                         const MatrixPath& p2, const TimeGrid& grid,
                                         double epsilon = 0.0);

}  // namespace lqpi
