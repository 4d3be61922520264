#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "lqpi/bsde.hpp"
#include "lqpi/ensemble.hpp"
#include "lqpi/matrix_path.hpp"
#include "lqpi/problem.hpp"
#include "lqpi/summation.hpp"

namespace lqpi {

// Per-path control table tied to an ensemble: K x n_steps x m, row-major.
struct ControlTable {
  int K = 0, steps = 0, m = 0;
  std::vector<double> values;
  Vector at(int path, int step) const {
    Eigen::Map<const Vector> v(values.data() + (static_cast<std::size_t>(path) * steps + step) * m, m);
    return v;
  }
};

// Pair (Theta, Lambda) with a validity horizon. Lambda carries one of three
// representations: a deterministic path, a Markov closed form
// lambda_det(t) + lambda_bar(t) e^{kappa w + nu t}, or per-path values tied
// to an ensemble (LSMC).
struct FeedbackLaw {
  MatrixPath theta;       // m x n
  MatrixPath lambda_det;  // m x 1
  bool has_exp = false;
  double kappa = 0.0, nu = 0.0;
  MatrixPath lambda_bar;  // m x 1, used when has_exp
  std::shared_ptr<const ControlTable> lambda_paths;  // optional ensemble-tied values
  double valid_until = 1.0;
  bool singular_at_T = false;

  bool lambda_is_ensemble_tied() const { return lambda_paths != nullptr; }
  Vector lambda(double t, double w) const;
  Vector lambda(int path, int step) const;  // ensemble-tied
};

// Euler-Maruyama trajectories of the filtered closed loop together with the
// controls that produced them.
struct SimResult {
  TimeGrid grid;
  int K = 0, n = 0, m = 0;
  std::vector<double> x;   // K x (n_steps + 1) x n states
  std::vector<double> u;   // K x n_steps x m controls (left labels)
  std::vector<double> w2;  // K x (n_steps + 1) W2 levels of the driving paths

  double w2_level(int path, int node) const {
    return w2[static_cast<std::size_t>(path) * (grid.n_steps + 1) + node];
  }
  Vector state(int path, int node) const {
    Eigen::Map<const Vector> v(x.data() + (static_cast<std::size_t>(path) * (grid.n_steps + 1) + node) * n, n);
    return v;
  }
  Vector control(int path, int step) const {
    Eigen::Map<const Vector> v(u.data() + (static_cast<std::size_t>(path) * grid.n_steps + step) * m, m);
    return v;
  }
  void write_csv(std::ostream& os) const;  // long format: path_id, t, x..., u...
};

// dxh = [(A + B Theta) xh + B Lambda + b] dt + [(C2 + D2 Theta) xh + D2 Lambda + sigma2] dW2,
// driven by the ensemble's dW2 stream only.
SimResult simulate_filtered_state(const ProblemSpec& spec, const FeedbackLaw& law,
                                  const PathEnsemble& ensemble, double s, const Vector& x0,
                                  int workers = 1);

// Full-state dynamics under externally supplied controls; uses both noise streams.
SimResult simulate_full_state(const ProblemSpec& spec, const SimResult& controls,
                              const PathEnsemble& ensemble, double s, const Vector& x0,
                              int workers = 1);

// Monte Carlo cost: left-endpoint quadrature in t, sample average over paths.
MeanStderr evaluate_cost(const ProblemSpec& spec, const SimResult& traj, double s);

// estimate of E int_s^T |u|^2 dt
MeanStderr control_l2_norm(const SimResult& traj);

// per-path squared L2 distance between two control tables on a shared ensemble
MeanStderr control_l2_distance(const SimResult& a, const SimResult& b);

}  // namespace lqpi
