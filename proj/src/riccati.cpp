#include "lqpi/riccati.hpp"

#include <cmath>
#include <limits>

#include "lqpi/linalg.hpp"

namespace lqpi {

namespace {

using Rhs = std::function<Matrix(double, const Matrix&)>;

Matrix rk4_step(const Rhs& rhs, double t, const Matrix& y, double h) {
  // backward step: from t to t - h
  const Matrix k1 = rhs(t, y);
  const Matrix k2 = rhs(t - 0.5 * h, y - (0.5 * h) * k1);
  const Matrix k3 = rhs(t - 0.5 * h, y - (0.5 * h) * k2);
  const Matrix k4 = rhs(t - h, y - h * k3);
  return y - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double max_abs(const Matrix& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

MatrixPath integrate_backward(const Rhs& rhs, const TimeGrid& grid, const Matrix& terminal,
                              bool symmetric, const IntegratorOptions& opts,
                              const std::function<void(Matrix&)>& project) {
  MatrixPath out(grid, static_cast<int>(terminal.rows()), static_cast<int>(terminal.cols()),
                 symmetric);
  Matrix y = terminal;
  if (project) project(y);
  out.at(grid.n_steps) = y;

  const double h = grid.h();
  for (int i = grid.n_steps; i-- > 0;) {
    const double t1 = grid.t(i + 1);
    const double t0 = grid.t(i);
    if (!opts.adaptive) {
      y = rk4_step(rhs, t1, y, t1 - t0);
      if (project) project(y);
      if (!y.allFinite() || max_abs(y) > opts.cap) throw BlowUpError(t0);
      out.at(i) = y;
      continue;
    }
    double t = t1;
    double sub = h;
    while (t - t0 > 1e-15 * std::max(1.0, std::fabs(t0))) {
      sub = std::min(sub, t - t0);
      for (;;) {
        const Matrix full = rk4_step(rhs, t, y, sub);
        Matrix half = rk4_step(rhs, t, y, 0.5 * sub);
        half = rk4_step(rhs, t - 0.5 * sub, half, 0.5 * sub);
        const bool finite = full.allFinite() && half.allFinite();
        const double err = finite ? max_abs(full - half) / 15.0
                                  : std::numeric_limits<double>::infinity();
        const double tol = opts.atol + opts.rtol * std::max(max_abs(y), finite ? max_abs(half) : 0.0);
        if (finite && err <= tol) {
          y = half + (half - full) / 15.0;
          if (project) project(y);
          if (max_abs(y) > opts.cap) throw BlowUpError(t - sub);
          t -= sub;
          const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
          sub *= std::min(4.0, std::max(0.2, grow));
          break;
        }
        const double shrink =
            (finite && err > 0.0) ? std::max(0.1, 0.9 * std::pow(tol / err, 0.2)) : 0.1;
        sub *= shrink;
        if (sub < 1e-14 * std::max(1.0, std::fabs(t))) throw BlowUpError(t);
      }
    }
    out.at(i) = y;
  }
  return out;
}

Matrix p1_rhs(const ProblemSpec& spec, double t, const Matrix& P1) {
  const Matrix A = spec.A(t), C1 = spec.C1(t), C2 = spec.C2(t);
  return -(A.transpose() * P1 + P1 * A + C1.transpose() * P1 * C1 + C2.transpose() * P1 * C2 +
           spec.Q(t));
}

GainBlocks gain_blocks(const ProblemSpec& spec, double t, const Matrix& P1, const Matrix& P2,
                       double epsilon) {
  const Matrix B = spec.B(t), C1 = spec.C1(t), C2 = spec.C2(t), D1 = spec.D1(t), D2 = spec.D2(t);
  GainBlocks g;
  g.K = spec.R(t) + epsilon * Matrix::Identity(spec.m, spec.m) + D1.transpose() * P1 * D1 +
        D2.transpose() * P2 * D2;
  g.K = 0.5 * (g.K + g.K.transpose());
  g.L = B.transpose() * P2 + D1.transpose() * P1 * C1 + D2.transpose() * P2 * C2 + spec.S(t);
  return g;
}

Matrix p2_rhs(const ProblemSpec& spec, double t, const Matrix& P1, const Matrix& P2,
              double epsilon) {
  const Matrix A = spec.A(t), C1 = spec.C1(t), C2 = spec.C2(t);
  const GainBlocks g = gain_blocks(spec, t, P1, P2, epsilon);
  const Matrix Kinv = epsilon > 0.0 ? Matrix(g.K.inverse()) : linalg::pinv(g.K);
  return -(A.transpose() * P2 + P2 * A + C1.transpose() * P1 * C1 + C2.transpose() * P2 * C2 -
           g.L.transpose() * Kinv * g.L + spec.Q(t));
}

MatrixPath solve_p1(const ProblemSpec& spec, const TimeGrid& grid, const IntegratorOptions& opts) {
  auto rhs = [&spec](double t, const Matrix& P) { return p1_rhs(spec, t, P); };
  auto proj = [](Matrix& M) { M = 0.5 * (M + M.transpose()).eval(); };
  return integrate_backward(rhs, grid, spec.G, true, opts, proj);
}

P2Solution solve_p2(const ProblemSpec& spec, const MatrixPath& p1, const TimeGrid& grid,
                    double epsilon, const IntegratorOptions& opts) {
  if (!(p1.grid() == grid)) throw std::invalid_argument("solve_p2: p1 grid mismatch");
  if (epsilon < 0.0) throw std::invalid_argument("solve_p2: epsilon must be >= 0");
  const int n = spec.n;

  // joint state [P1 | P2], so P1 at substeps is integrated, not interpolated
  auto rhs = [&spec, n, epsilon](double t, const Matrix& Y) {
    const Matrix P1b = Y.leftCols(n);
    const Matrix P2b = Y.rightCols(n);
    Matrix out(n, 2 * n);
    out.leftCols(n) = p1_rhs(spec, t, P1b);
    out.rightCols(n) = p2_rhs(spec, t, P1b, P2b, epsilon);
    return out;
  };
  auto proj = [n](Matrix& Y) {
    Y.leftCols(n) = 0.5 * (Y.leftCols(n) + Y.leftCols(n).transpose()).eval();
    Y.rightCols(n) = 0.5 * (Y.rightCols(n) + Y.rightCols(n).transpose()).eval();
  };
  Matrix terminal(n, 2 * n);
  terminal.leftCols(n) = spec.G;
  terminal.rightCols(n) = spec.G;

  const MatrixPath joint = integrate_backward(rhs, grid, terminal, false, opts, proj);

  P2Solution sol;
  sol.path = MatrixPath(grid, n, n, true);
  for (int i = 0; i <= grid.n_steps; ++i) sol.path.at(i) = joint.at(i).rightCols(n);

  if (epsilon == 0.0) {
    int prev_rank = -1;
    for (int i = 0; i <= grid.n_steps; ++i) {
      const GainBlocks g = gain_blocks(spec, grid.t(i), joint.at(i).leftCols(n), sol.path.at(i), 0.0);
      const int r = linalg::svd_rank(g.K);
      if (prev_rank >= 0 && r != prev_rank) sol.singular_block_times.push_back(grid.t(i));
      prev_rank = r;
    }
  }
  return sol;
}

std::pair<MatrixPath, MatrixPath> solve_lyapunov_pair(const ProblemSpec& spec,
                                                      const MatrixPath& theta,
                                                      const TimeGrid& grid,
                                                      const IntegratorOptions& opts) {
  const int n = spec.n;
  auto rhs = [&spec, &theta, n](double t, const Matrix& Y) {
    const Matrix Th = theta.eval(t);
    const Matrix Ma = spec.A(t) + spec.B(t) * Th;
    const Matrix M1 = spec.C1(t) + spec.D1(t) * Th;
    const Matrix M2 = spec.C2(t) + spec.D2(t) * Th;
    const Matrix Q = spec.Q(t), S = spec.S(t), R = spec.R(t);
    const Matrix Pt1 = Y.leftCols(n);
    const Matrix Pt2 = Y.rightCols(n);
    Matrix out(n, 2 * n);
    out.leftCols(n) =
        -(Pt1 * Ma + Ma.transpose() * Pt1 + M1.transpose() * Pt1 * M1 + M2.transpose() * Pt1 * M2 + Q);
    out.rightCols(n) = -(Pt2 * Ma + Ma.transpose() * Pt2 + M1.transpose() * Pt1 * M1 +
                         M2.transpose() * Pt2 * M2 + Th.transpose() * R * Th +
                         S.transpose() * Th + Th.transpose() * S + Q);
    return out;
  };
  auto proj = [n](Matrix& Y) {
    Y.leftCols(n) = 0.5 * (Y.leftCols(n) + Y.leftCols(n).transpose()).eval();
    Y.rightCols(n) = 0.5 * (Y.rightCols(n) + Y.rightCols(n).transpose()).eval();
  };
  Matrix terminal(n, 2 * n);
  terminal.leftCols(n) = spec.G;
  terminal.rightCols(n) = spec.G;
  const MatrixPath joint = integrate_backward(rhs, grid, terminal, false, opts, proj);

  MatrixPath pt1(grid, n, n, true), pt2(grid, n, n, true);
  for (int i = 0; i <= grid.n_steps; ++i) {
    pt1.at(i) = joint.at(i).leftCols(n);
    pt2.at(i) = joint.at(i).rightCols(n);
  }
  return {pt1, pt2};
}

PositivityCheck check_uniform_positivity(const ProblemSpec& spec, const MatrixPath& p1,
                                         const MatrixPath& p2, const TimeGrid& grid,
                                         double epsilon) {
  PositivityCheck out;
  out.gamma_hat = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid.n_steps; ++i) {
    const GainBlocks g = gain_blocks(spec, grid.t(i), p1.at(i), p2.at(i), epsilon);
    out.gamma_hat = std::min(out.gamma_hat, linalg::min_eigenvalue(g.K));
  }
  out.ok = out.gamma_hat > 0.0;
  return out;
}

}  // namespace lqpi
