#include "lqpi/bsde.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "lqpi/io.hpp"
#include "lqpi/linalg.hpp"

namespace lqpi {

namespace {

struct ExpoPart {
  bool present = false;
  Vector direction;
  std::function<double(double)> profile;
  std::function<double(double)> tail;  // may be null
};

struct DataSplit {
  BsdeDataKind kind = BsdeDataKind::Deterministic;
  double kappa = 0.0, nu = 0.0;
  ExpoPart b, sigma1, sigma2, q, rho, g;
};

void classify_one(const CoefficientProcess& c, ExpoPart& part, DataSplit& split, bool& first) {
  if (c.is_deterministic()) return;
  const auto* fam = c.exponential_family();
  if (fam == nullptr) {
    split.kind = BsdeDataKind::General;
    return;
  }
  if (first) {
    split.kappa = fam->kappa;
    split.nu = fam->nu;
    first = false;
  } else if (fam->kappa != split.kappa || fam->nu != split.nu) {
    split.kind = BsdeDataKind::General;  // mixed features: fall back to regression
    return;
  }
  split.kind = BsdeDataKind::ExponentialFamily;
  part.present = true;
  part.direction = fam->direction;
  part.profile = fam->profile;
  part.tail = fam->tail_integral;
}

DataSplit split_data(const ProblemSpec& spec) {
  DataSplit s;
  bool first = true;
  classify_one(spec.b, s.b, s, first);
  classify_one(spec.sigma1, s.sigma1, s, first);
  classify_one(spec.sigma2, s.sigma2, s, first);
  classify_one(spec.q, s.q, s, first);
  classify_one(spec.rho, s.rho, s, first);
  classify_one(spec.g, s.g, s, first);
  return s;
}

Vector det_eval(const CoefficientProcess& c, double t) {
  return c.is_deterministic() ? c.eval(t) : Vector::Zero(c.dim());
}

Vector expo_eval(const ExpoPart& p, int dim, double t) {
  if (!p.present) return Vector::Zero(dim);
  return Vector(p.profile(t) * p.direction);
}

}  // namespace

BsdeDataKind classify_bsde_data(const ProblemSpec& spec) { return split_data(spec).kind; }

Vector BsdeSolution::alpha(double t, double w) const {
  Vector a = alpha_det.eval(t).col(0);
  if (has_exp) a += std::exp(kappa * w + nu * t) * alpha_bar.eval(t).col(0);
  return a;
}

Vector BsdeSolution::beta(double t, double w) const {
  if (!has_exp) return Vector::Zero(n);
  return Vector(kappa * std::exp(kappa * w + nu * t) * alpha_bar.eval(t).col(0));
}

Vector BsdeSolution::alpha_at(int path, int node) const {
  const int nodes = grid.size();
  Eigen::Map<const Vector> v(alpha_paths.data() + (static_cast<std::size_t>(path) * nodes + node) * n, n);
  return v;
}

Vector BsdeSolution::beta_at(int path, int node) const {
  const int nodes = grid.size();
  Eigen::Map<const Vector> v(beta_paths.data() + (static_cast<std::size_t>(path) * nodes + node) * n, n);
  return v;
}

void BsdeSolution::write_csv(std::ostream& os) const {
  if (backend == BsdeBackend::DeterministicODE) {
    std::vector<std::string> header{"t"};
    for (int j = 0; j < n; ++j) header.push_back("alpha" + std::to_string(j));
    for (int j = 0; j < n; ++j) header.push_back("alpha_bar" + std::to_string(j));
    for (int j = 0; j < n; ++j) header.push_back("beta_bar" + std::to_string(j));
    io::write_csv_row(os, header);
    for (int i = 0; i < grid.size(); ++i) {
      std::vector<double> row{grid.t(i)};
      for (int j = 0; j < n; ++j) row.push_back(alpha_det.at(i)(j, 0));
      for (int j = 0; j < n; ++j) row.push_back(has_exp ? alpha_bar.at(i)(j, 0) : 0.0);
      for (int j = 0; j < n; ++j) row.push_back(has_exp ? kappa * alpha_bar.at(i)(j, 0) : 0.0);
      io::write_csv_row(os, row);
    }
    return;
  }
  std::vector<std::string> header{"path_id", "t"};
  for (int j = 0; j < n; ++j) header.push_back("alpha" + std::to_string(j));
  for (int j = 0; j < n; ++j) header.push_back("beta" + std::to_string(j));
  io::write_csv_row(os, header);
  for (int p = 0; p < K; ++p)
    for (int i = 0; i < grid.size(); ++i) {
      std::vector<double> row{static_cast<double>(p), grid.t(i)};
      const Vector a = alpha_at(p, i), bb = beta_at(p, i);
      for (int j = 0; j < n; ++j) row.push_back(a(j));
      for (int j = 0; j < n; ++j) row.push_back(bb(j));
      io::write_csv_row(os, row);
    }
}

BsdeSolution solve_bsde_deterministic(const ProblemSpec& spec, const MatrixPath& p1,
                                      const MatrixPath& p2, const MatrixPath& theta,
                                      const TimeGrid& grid, const IntegratorOptions& opts) {
  if (classify_bsde_data(spec) != BsdeDataKind::Deterministic)
    throw std::invalid_argument(
        "solve_bsde_deterministic: inhomogeneous data is not deterministic; use the LSMC backend");
  const int n = spec.n;
  auto rhs = [&](double t, const Matrix& a) {
    const Matrix Th = theta.eval(t);
    const Matrix P1t = p1.eval(t), P2t = p2.eval(t);
    const Matrix Ma = spec.A(t) + spec.B(t) * Th;
    const Matrix M1 = spec.C1(t) + spec.D1(t) * Th;
    const Matrix M2 = spec.C2(t) + spec.D2(t) * Th;
    const Vector f = M1.transpose() * P1t * spec.sigma1.eval(t) +
                     M2.transpose() * P2t * spec.sigma2.eval(t) +
                     Th.transpose() * spec.rho.eval(t) + P2t * spec.b.eval(t) + spec.q.eval(t);
    return Matrix(-(Ma.transpose() * a.col(0) + f));
  };
  BsdeSolution sol;
  sol.backend = BsdeBackend::DeterministicODE;
  sol.grid = grid;
  sol.n = n;
  sol.alpha_det = integrate_backward(rhs, grid, spec.g.eval(spec.T), false, opts);
  sol.alpha_bar = MatrixPath(grid, n, 1, false);
  return sol;
}

FeedbackOde solve_feedback_ode(const ProblemSpec& spec, const TimeGrid& grid, double epsilon,
                               const IntegratorOptions& opts) {
  const DataSplit data = split_data(spec);
  if (data.kind == BsdeDataKind::General)
    throw std::invalid_argument(
        "solve_feedback_ode: data outside the deterministic/exponential families; use LSMC");
  if (std::fabs(grid.T - spec.T) > 1e-12)
    throw std::invalid_argument("solve_feedback_ode: grid must end at the spec horizon");

  const int n = spec.n, m = spec.m;
  const bool has_exp = data.kind == BsdeDataKind::ExponentialFamily;
  const double kappa = data.kappa, nu = data.nu;
  const bool desingular_b = data.b.present && static_cast<bool>(data.b.tail);

  auto kinv_of = [&spec, epsilon](const GainBlocks& gb) {
    return epsilon > 0.0 ? Matrix(gb.K.inverse()) : linalg::pinv(gb.K);
  };

  // packed backward state: [P1 | P2 | alpha_det | w]
  auto rhs = [&, n, m](double t, const Matrix& Y) {
    const Matrix P1t = Y.middleCols(0, n);
    const Matrix P2t = Y.middleCols(n, n);
    const Vector a_det = Y.col(2 * n);
    const Vector wv = Y.col(2 * n + 1);

    const GainBlocks gb = gain_blocks(spec, t, P1t, P2t, epsilon);
    const Matrix Th = -kinv_of(gb) * gb.L;
    const Matrix Ma = spec.A(t) + spec.B(t) * Th;
    const Matrix M1 = spec.C1(t) + spec.D1(t) * Th;
    const Matrix M2 = spec.C2(t) + spec.D2(t) * Th;

    Matrix out = Matrix::Zero(n, 2 * n + 2);
    out.middleCols(0, n) = p1_rhs(spec, t, P1t);
    const Matrix p2dot =
        -(spec.A(t).transpose() * P2t + P2t * spec.A(t) + spec.C1(t).transpose() * P1t * spec.C1(t) +
          spec.C2(t).transpose() * P2t * spec.C2(t) - gb.L.transpose() * kinv_of(gb) * gb.L +
          spec.Q(t));
    out.middleCols(n, n) = p2dot;

    const Vector f_det = M1.transpose() * P1t * det_eval(spec.sigma1, t) +
                         M2.transpose() * P2t * det_eval(spec.sigma2, t) +
                         Th.transpose() * det_eval(spec.rho, t) + P2t * det_eval(spec.b, t) +
                         det_eval(spec.q, t);
    out.col(2 * n) = -(Ma.transpose() * a_det + f_det);

    if (has_exp) {
      const Matrix Nmat = (nu + 0.5 * kappa * kappa) * Matrix::Identity(n, n) + Ma + kappa * M2;
      Vector f_reg = M1.transpose() * P1t * expo_eval(data.sigma1, n, t) +
                     M2.transpose() * P2t * expo_eval(data.sigma2, n, t) +
                     Th.transpose() * expo_eval(data.rho, m, t) + expo_eval(data.q, n, t);
      Vector wdot = -(Nmat.transpose() * wv) - f_reg;
      if (desingular_b) {
        // alpha_bar = w + P2 dir_b z(t); the singular profile cancels exactly
        const Vector cf = P2t * data.b.direction;
        const Vector cfdot = p2dot * data.b.direction;
        wdot -= (Nmat.transpose() * cf + cfdot) * data.b.tail(t);
      } else if (data.b.present) {
        wdot -= P2t * expo_eval(data.b, n, t);
      }
      out.col(2 * n + 1) = wdot;
    }
    return out;
  };

  auto proj = [n](Matrix& Y) {
    Y.middleCols(0, n) = 0.5 * (Y.middleCols(0, n) + Y.middleCols(0, n).transpose()).eval();
    Y.middleCols(n, n) = 0.5 * (Y.middleCols(n, n) + Y.middleCols(n, n).transpose()).eval();
  };

  Matrix terminal = Matrix::Zero(n, 2 * n + 2);
  terminal.middleCols(0, n) = spec.G;
  terminal.middleCols(n, n) = spec.G;
  terminal.col(2 * n) = det_eval(spec.g, spec.T);
  if (has_exp && data.g.present) terminal.col(2 * n + 1) = expo_eval(data.g, n, spec.T);

  const MatrixPath joint = integrate_backward(rhs, grid, terminal, false, opts, proj);

  FeedbackOde out;
  out.has_exp = has_exp;
  out.kappa = kappa;
  out.nu = nu;
  out.p1 = MatrixPath(grid, n, n, true);
  out.p2 = MatrixPath(grid, n, n, true);
  out.theta = MatrixPath(grid, m, n, false);
  out.lambda_det = MatrixPath(grid, m, 1, false);
  out.lambda_bar = MatrixPath(grid, m, 1, false);
  out.bsde.backend = BsdeBackend::DeterministicODE;
  out.bsde.grid = grid;
  out.bsde.n = n;
  out.bsde.alpha_det = MatrixPath(grid, n, 1, false);
  out.bsde.alpha_bar = MatrixPath(grid, n, 1, false);
  out.bsde.has_exp = has_exp;
  out.bsde.kappa = kappa;
  out.bsde.nu = nu;

  int prev_rank = -1;
  for (int i = 0; i <= grid.n_steps; ++i) {
    const double t = grid.t(i);
    const Matrix P1t = joint.at(i).middleCols(0, n);
    const Matrix P2t = joint.at(i).middleCols(n, n);
    out.p1.at(i) = P1t;
    out.p2.at(i) = P2t;

    const GainBlocks gb = gain_blocks(spec, t, P1t, P2t, epsilon);
    if (epsilon == 0.0) {
      const int r = linalg::svd_rank(gb.K);
      if (prev_rank >= 0 && r != prev_rank) out.singular_block_times.push_back(t);
      prev_rank = r;
    }
    const Matrix Kinv = kinv_of(gb);
    out.theta.at(i) = -Kinv * gb.L;

    const Vector a_det = joint.at(i).col(2 * n);
    out.bsde.alpha_det.at(i) = a_det;
    const Matrix B = spec.B(t), D1 = spec.D1(t), D2 = spec.D2(t);
    out.lambda_det.at(i) =
        -Kinv * (B.transpose() * a_det + D1.transpose() * P1t * det_eval(spec.sigma1, t) +
                 D2.transpose() * P2t * det_eval(spec.sigma2, t) + det_eval(spec.rho, t));
    if (has_exp) {
      Vector a_bar = joint.at(i).col(2 * n + 1);
      if (desingular_b) a_bar += (P2t * data.b.direction) * data.b.tail(t);
      out.bsde.alpha_bar.at(i) = a_bar;
      out.lambda_bar.at(i) =
          -Kinv * (B.transpose() * a_bar + kappa * D2.transpose() * a_bar +
                   D1.transpose() * P1t * expo_eval(data.sigma1, n, t) +
                   D2.transpose() * P2t * expo_eval(data.sigma2, n, t) + expo_eval(data.rho, m, t));
    }
  }
  return out;
}

void RegressionBasis::fill_row(double t, double w, double* row) const {
  double p = 1.0;
  for (int j = 0; j <= degree; ++j) {
    row[j] = p;
    p *= w;
  }
  if (use_exp_feature) {
    const double e = std::exp(kappa * w + nu * t);
    p = e;
    for (int j = 0; j <= degree; ++j) {
      row[degree + 1 + j] = p;
      p *= w;
    }
  }
}

std::string RegressionBasis::describe() const {
  std::string s = "poly(w2) degree " + std::to_string(degree);
  if (use_exp_feature)
    s += " x {1, exp(" + io::format_double(kappa) + "*w + " + io::format_double(nu) + "*t)}";
  return s;
}

RegressionBasis default_basis(const ProblemSpec& spec) {
  RegressionBasis b;
  const DataSplit s = split_data(spec);
  if (s.kind == BsdeDataKind::ExponentialFamily) {
    b.use_exp_feature = true;
    b.kappa = s.kappa;
    b.nu = s.nu;
  }
  return b;
}

BsdeSolution solve_bsde_lsmc(const ProblemSpec& spec, const MatrixPath& p1, const MatrixPath& p2,
                             const MatrixPath& theta, const TimeGrid& grid,
                             const PathEnsemble& ensemble, const RegressionBasis& basis,
                             double epsilon, const LsmcOptions& opts) {
  if (!(ensemble.grid() == grid)) throw std::invalid_argument("solve_bsde_lsmc: grid mismatch");
  const int n = spec.n, m = spec.m;
  const int K = ensemble.paths();
  const int N = grid.n_steps;
  const int nodes = N + 1;
  const int nb = basis.size();
  const double h = grid.h();
  const DataSplit data = split_data(spec);
  const bool analytic_last_b = data.b.present && static_cast<bool>(data.b.tail);

  const std::vector<double> w2 = ensemble.materialize_w2();
  auto wlev = [&](int path, int node) { return w2[static_cast<std::size_t>(path) * nodes + node]; };

  BsdeSolution sol;
  sol.backend = BsdeBackend::LSMC;
  sol.grid = grid;
  sol.n = n;
  sol.K = K;
  sol.basis_spec = basis.describe();
  sol.alpha_paths.assign(static_cast<std::size_t>(K) * nodes * n, 0.0);
  sol.beta_paths.assign(static_cast<std::size_t>(K) * nodes * n, 0.0);
  auto alpha_slot = [&](int path, int node) {
    return sol.alpha_paths.data() + (static_cast<std::size_t>(path) * nodes + node) * n;
  };
  auto beta_slot = [&](int path, int node) {
    return sol.beta_paths.data() + (static_cast<std::size_t>(path) * nodes + node) * n;
  };

  // terminal condition, pathwise exact
  for (int p = 0; p < K; ++p) {
    const Vector gT = spec.g.eval(spec.T, wlev(p, N));
    Eigen::Map<Vector>(alpha_slot(p, N), n) = gT;
  }

  Matrix X(K, nb);
  Matrix Y(K, 2 * n);  // [alpha_{i+1} | alpha_{i+1} * dW / h]
  std::vector<double> row(static_cast<std::size_t>(nb));

  for (int i = N - 1; i >= 0; --i) {
    const double t = grid.t(i);
    const Matrix Th = theta.at(i);
    const Matrix P1t = p1.at(i), P2t = p2.at(i);
    const Matrix Ma = spec.A(t) + spec.B(t) * Th;
    const Matrix M1 = spec.C1(t) + spec.D1(t) * Th;
    const Matrix M2 = spec.C2(t) + spec.D2(t) * Th;

    for (int p = 0; p < K; ++p) {
      const double dw = ensemble.dW2(p, i);
      Eigen::Map<const Vector> an(alpha_slot(p, i + 1), n);
      Y.row(p).head(n) = an.transpose();
      Y.row(p).tail(n) = (dw / h) * an.transpose();
    }

    Matrix fitted(K, 2 * n);
    if (i == 0) {
      // W2(t0) = 0 on every path: the conditioning sigma-algebra is trivial
      fitted = Y.colwise().mean().replicate(K, 1);
    } else {
      for (int p = 0; p < K; ++p) {
        basis.fill_row(t, wlev(p, i), row.data());
        for (int j = 0; j < nb; ++j) X(p, j) = row[static_cast<std::size_t>(j)];
      }
      Vector scale(nb);
      for (int j = 0; j < nb; ++j) {
        const double nrm = X.col(j).norm();
        scale(j) = nrm > 0.0 ? nrm : 1.0;
        X.col(j) /= scale(j);
      }
      const Matrix Gm = X.transpose() * X;
      Eigen::SelfAdjointEigenSolver<Matrix> es(Gm);
      const double lmin = es.eigenvalues()(0), lmax = es.eigenvalues()(nb - 1);
      if (!(lmin > 0.0) || lmax / lmin > opts.max_normal_cond) throw IllConditionedRegression(t);
      const Matrix coef = es.eigenvectors() *
                          es.eigenvalues().cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose() * (X.transpose() * Y);
      fitted = X * coef;
    }

    for (int p = 0; p < K; ++p) {
      const double w = wlev(p, i);
      const Vector ea = fitted.row(p).head(n).transpose();
      const Vector eb = fitted.row(p).tail(n).transpose();
      Vector fdrift = M1.transpose() * P1t * spec.sigma1.eval(t, w) +
                      M2.transpose() * P2t * spec.sigma2.eval(t, w) +
                      Th.transpose() * spec.rho.eval(t, w) + spec.q.eval(t, w);
      Vector bterm;
      if (analytic_last_b && i == N - 1) {
        // integrable blow-up in b: use the declared tail integral on the last step
        const double e = std::exp(data.kappa * w + data.nu * t);
        bterm = (data.b.tail(t) / h * e) * (P2t * data.b.direction);
      } else {
        bterm = P2t * spec.b.eval(t, w);
      }
      fdrift += bterm;
      const Vector ai = ea + h * (Ma.transpose() * ea + M2.transpose() * eb + fdrift);
      Eigen::Map<Vector>(alpha_slot(p, i), n) = ai;
      Eigen::Map<Vector>(beta_slot(p, i), n) = eb;
    }
  }
  return sol;
}

}  // namespace lqpi
