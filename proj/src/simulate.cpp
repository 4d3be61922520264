#include "lqpi/simulate.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "lqpi/io.hpp"

namespace lqpi {

namespace {

Vector eval_coeff(const CoefficientProcess& c, double t, double w, const std::vector<double>& times,
                  const std::vector<double>& levels) {
  if (c.kind() == CoefficientProcess::Kind::PathFunctional) return c.eval_path(t, times, levels);
  return c.eval(t, w);
}

}  // namespace

Vector FeedbackLaw::lambda(double t, double w) const {
  if (lambda_is_ensemble_tied())
    throw std::logic_error("FeedbackLaw: ensemble-tied lambda needs (path, step) evaluation");
  Vector v = lambda_det.eval(t).col(0);
  if (has_exp) v += std::exp(kappa * w + nu * t) * lambda_bar.eval(t).col(0);
  return v;
}

Vector FeedbackLaw::lambda(int path, int step) const {
  if (!lambda_is_ensemble_tied())
    throw std::logic_error("FeedbackLaw: lambda is not ensemble-tied");
  return lambda_paths->at(path, step);
}

void SimResult::write_csv(std::ostream& os) const {
  std::vector<std::string> header{"path_id", "t"};
  for (int j = 0; j < n; ++j) header.push_back("x" + std::to_string(j));
  for (int j = 0; j < m; ++j) header.push_back("u" + std::to_string(j));
  io::write_csv_row(os, header);
  for (int p = 0; p < K; ++p)
    for (int i = 0; i <= grid.n_steps; ++i) {
      std::vector<double> rowv{static_cast<double>(p), grid.t(i)};
      const Vector xv = state(p, i);
      for (int j = 0; j < n; ++j) rowv.push_back(xv(j));
      for (int j = 0; j < m; ++j) rowv.push_back(i < grid.n_steps ? control(p, i)(j) : 0.0);
      io::write_csv_row(os, rowv);
    }
}

SimResult simulate_filtered_state(const ProblemSpec& spec, const FeedbackLaw& law,
                                  const PathEnsemble& ensemble, double s, const Vector& x0,
                                  int workers) {
  const TimeGrid& grid = ensemble.grid();
  if (std::fabs(grid.t0 - s) > 1e-12)
    throw std::invalid_argument("simulate_filtered_state: ensemble grid must start at s");
  if (grid.T > law.valid_until + 1e-12)
    throw std::domain_error("simulate_filtered_state: law evaluated beyond valid_until");
  const int n = spec.n, m = spec.m, N = grid.n_steps, K = ensemble.paths();
  const double h = grid.h();

  SimResult out;
  out.grid = grid;
  out.K = K;
  out.n = n;
  out.m = m;
  out.x.assign(static_cast<std::size_t>(K) * (N + 1) * n, 0.0);
  out.u.assign(static_cast<std::size_t>(K) * N * m, 0.0);
  out.w2.assign(static_cast<std::size_t>(K) * (N + 1), 0.0);

  // deterministic per-step data shared across paths
  std::vector<Matrix> Th(N), Bv(N), D2v(N), Ma(N), Mc(N);
  std::vector<double> tv(N);
  for (int i = 0; i < N; ++i) {
    const double t = grid.t(i);
    tv[i] = t;
    Th[i] = law.theta.eval(t);
    Bv[i] = spec.B(t);
    D2v[i] = spec.D2(t);
    Ma[i] = spec.A(t) + Bv[i] * Th[i];
    Mc[i] = spec.C2(t) + D2v[i] * Th[i];
  }

  parallel_for(static_cast<std::size_t>(K), workers, [&](std::size_t pz) {
    const int p = static_cast<int>(pz);
    Vector xh = x0;
    std::vector<double> times{grid.t(0)};
    std::vector<double> levels{0.0};
    double w = 0.0;
    Eigen::Map<Vector>(out.x.data() + static_cast<std::size_t>(p) * (N + 1) * n, n) = xh;
    for (int i = 0; i < N; ++i) {
      const double t = tv[i];
      const Vector lam = law.lambda_is_ensemble_tied() ? law.lambda(p, i) : law.lambda(t, w);
      const Vector uc = Th[i] * xh + lam;
      const Vector bt = eval_coeff(spec.b, t, w, times, levels);
      const Vector s2 = eval_coeff(spec.sigma2, t, w, times, levels);
      const double dw2 = ensemble.dW2(p, i);
      xh = xh + h * (Ma[i] * xh + Bv[i] * lam + bt) + dw2 * (Mc[i] * xh + D2v[i] * lam + s2);
      w += dw2;
      times.push_back(grid.t(i + 1));
      levels.push_back(w);
      Eigen::Map<Vector>(out.u.data() + (static_cast<std::size_t>(p) * N + i) * m, m) = uc;
      Eigen::Map<Vector>(out.x.data() + (static_cast<std::size_t>(p) * (N + 1) + i + 1) * n, n) = xh;
      out.w2[static_cast<std::size_t>(p) * (N + 1) + i + 1] = w;
    }
  });
  return out;
}

SimResult simulate_full_state(const ProblemSpec& spec, const SimResult& controls,
                              const PathEnsemble& ensemble, double s, const Vector& x0,
                              int workers) {
  const TimeGrid& grid = ensemble.grid();
  if (!(controls.grid == grid))
    throw std::invalid_argument("simulate_full_state: control/ensemble grid mismatch");
  if (controls.K != ensemble.paths())
    throw std::invalid_argument("simulate_full_state: control/ensemble path count mismatch");
  if (std::fabs(grid.t0 - s) > 1e-12)
    throw std::invalid_argument("simulate_full_state: ensemble grid must start at s");
  const int n = spec.n, m = spec.m, N = grid.n_steps, K = ensemble.paths();
  const double h = grid.h();

  SimResult out;
  out.grid = grid;
  out.K = K;
  out.n = n;
  out.m = m;
  out.x.assign(static_cast<std::size_t>(K) * (N + 1) * n, 0.0);
  out.u = controls.u;
  out.w2.assign(static_cast<std::size_t>(K) * (N + 1), 0.0);

  std::vector<Matrix> Av(N), Bv(N), C1v(N), C2v(N), D1v(N), D2v(N);
  for (int i = 0; i < N; ++i) {
    const double t = grid.t(i);
    Av[i] = spec.A(t);
    Bv[i] = spec.B(t);
    C1v[i] = spec.C1(t);
    C2v[i] = spec.C2(t);
    D1v[i] = spec.D1(t);
    D2v[i] = spec.D2(t);
  }

  parallel_for(static_cast<std::size_t>(K), workers, [&](std::size_t pz) {
    const int p = static_cast<int>(pz);
    Vector x = x0;
    std::vector<double> times{grid.t(0)};
    std::vector<double> levels{0.0};
    double w = 0.0;
    Eigen::Map<Vector>(out.x.data() + static_cast<std::size_t>(p) * (N + 1) * n, n) = x;
    for (int i = 0; i < N; ++i) {
      const double t = grid.t(i);
      const Vector uc = controls.control(p, i);
      const Vector bt = eval_coeff(spec.b, t, w, times, levels);
      const Vector s1 = eval_coeff(spec.sigma1, t, w, times, levels);
      const Vector s2 = eval_coeff(spec.sigma2, t, w, times, levels);
      const double dw1 = ensemble.dW1(p, i);
      const double dw2 = ensemble.dW2(p, i);
      x = x + h * (Av[i] * x + Bv[i] * uc + bt) + dw1 * (C1v[i] * x + D1v[i] * uc + s1) +
          dw2 * (C2v[i] * x + D2v[i] * uc + s2);
      w += dw2;
      times.push_back(grid.t(i + 1));
      levels.push_back(w);
      Eigen::Map<Vector>(out.x.data() + (static_cast<std::size_t>(p) * (N + 1) + i + 1) * n, n) = x;
      out.w2[static_cast<std::size_t>(p) * (N + 1) + i + 1] = w;
    }
  });
  return out;
}

MeanStderr evaluate_cost(const ProblemSpec& spec, const SimResult& traj, double s) {
  const TimeGrid& grid = traj.grid;
  (void)s;
  const int N = grid.n_steps;
  const double h = grid.h();
  std::vector<Matrix> Qv(N), Sv(N), Rv(N);
  for (int i = 0; i < N; ++i) {
    const double t = grid.t(i);
    Qv[i] = spec.Q(t);
    Sv[i] = spec.S(t);
    Rv[i] = spec.R(t);
  }
  std::vector<double> per_path(static_cast<std::size_t>(traj.K));
  for (int p = 0; p < traj.K; ++p) {
    double acc = 0.0;
    std::vector<double> times{grid.t(0)}, levels{traj.w2_level(p, 0)};
    for (int i = 0; i < N; ++i) {
      const double t = grid.t(i);
      const double w = traj.w2_level(p, i);
      const Vector x = traj.state(p, i);
      const Vector u = traj.control(p, i);
      const Vector qv = eval_coeff(spec.q, t, w, times, levels);
      const Vector rv = eval_coeff(spec.rho, t, w, times, levels);
      acc += h * (x.dot(Qv[i] * x) + u.dot(Rv[i] * u) + 2.0 * u.dot(Sv[i] * x) + 2.0 * qv.dot(x) +
                  2.0 * rv.dot(u));
      times.push_back(grid.t(i + 1));
      levels.push_back(traj.w2_level(p, i + 1));
    }
    const Vector xT = traj.state(p, N);
    const Vector gv = spec.g.eval(spec.T, traj.w2_level(p, N));
    acc += xT.dot(spec.G * xT) + 2.0 * gv.dot(xT);
    per_path[static_cast<std::size_t>(p)] = acc;
  }
  return mean_stderr(per_path);
}

MeanStderr control_l2_norm(const SimResult& traj) {
  const double h = traj.grid.h();
  std::vector<double> per_path(static_cast<std::size_t>(traj.K));
  for (int p = 0; p < traj.K; ++p) {
    double acc = 0.0;
    for (int i = 0; i < traj.grid.n_steps; ++i) acc += h * traj.control(p, i).squaredNorm();
    per_path[static_cast<std::size_t>(p)] = acc;
  }
  return mean_stderr(per_path);
}

MeanStderr control_l2_distance(const SimResult& a, const SimResult& b) {
  if (!(a.grid == b.grid) || a.K != b.K || a.m != b.m)
    throw std::invalid_argument("control_l2_distance: incompatible trajectories");
  const double h = a.grid.h();
  std::vector<double> per_path(static_cast<std::size_t>(a.K));
  for (int p = 0; p < a.K; ++p) {
    double acc = 0.0;
    for (int i = 0; i < a.grid.n_steps; ++i)
      acc += h * (a.control(p, i) - b.control(p, i)).squaredNorm();
    per_path[static_cast<std::size_t>(p)] = acc;
  }
  return mean_stderr(per_path);
}

}  // namespace lqpi
