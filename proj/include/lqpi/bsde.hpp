#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lqpi/ensemble.hpp"
#include "lqpi/matrix_path.hpp"
#include "lqpi/problem.hpp"
#include "lqpi/riccati.hpp"

namespace lqpi {

enum class BsdeBackend { DeterministicODE, LSMC };

// Classification of the inhomogeneous data (b, sigma1, sigma2, q, rho, g):
//   Deterministic      -> exact ODE backend, beta = 0
//   ExponentialFamily  -> ODE backend in closed Markov form: all random
//                         coefficients share one e^{kappa w + nu t} feature
//   General            -> least-squares Monte Carlo
enum class BsdeDataKind { Deterministic, ExponentialFamily, General };
BsdeDataKind classify_bsde_data(const ProblemSpec& spec);

struct BsdeSolution {
  BsdeBackend backend = BsdeBackend::DeterministicODE;
  TimeGrid grid;
  int n = 0;

  // ODE backend: alpha(t, w) = alpha_det(t) + alpha_bar(t) e^{kappa w + nu t},
  // beta(t, w) = kappa alpha_bar(t) e^{kappa w + nu t}. alpha_bar vanishes for
  // purely deterministic data.
  MatrixPath alpha_det;  // n x 1
  MatrixPath alpha_bar;  // n x 1
  bool has_exp = false;
  double kappa = 0.0, nu = 0.0;

  Vector alpha(double t, double w) const;
  Vector beta(double t, double w) const;

  // LSMC backend: row-major K x (n_steps + 1) x n tables
  int K = 0;
  std::vector<double> alpha_paths;
  std::vector<double> beta_paths;
  std::string basis_spec;

  Vector alpha_at(int path, int node) const;
  Vector beta_at(int path, int node) const;

  void write_csv(std::ostream& os) const;
};

// Adjoint ODE for purely deterministic data (beta = 0); rejects anything
// else with std::invalid_argument. P1, P2, theta are interpolated from the
// given paths, so the residual is O(h^2).
BsdeSolution solve_bsde_deterministic(const ProblemSpec& spec, const MatrixPath& p1,
                                      const MatrixPath& p2, const MatrixPath& theta,
                                      const TimeGrid& grid, const IntegratorOptions& opts = {});

// One backward pass that integrates P1, P2(eps), the BSDE and the feedback
// gain jointly, for Deterministic or ExponentialFamily data. A declared
// integrable blow-up in b's profile is removed exactly through its tail
// integral before integration.
struct FeedbackOde {
  MatrixPath p1;               // n x n
  MatrixPath p2;               // n x n
  MatrixPath theta;            // m x n
  BsdeSolution bsde;           // ODE backend
  MatrixPath lambda_det;       // m x 1
  MatrixPath lambda_bar;       // m x 1
  bool has_exp = false;
  double kappa = 0.0, nu = 0.0;
  std::vector<double> singular_block_times;  // eps = 0 pinv rank changes
};
FeedbackOde solve_feedback_ode(const ProblemSpec& spec, const TimeGrid& grid, double epsilon,
                               const IntegratorOptions& opts = {});

class IllConditionedRegression : public std::runtime_error {
 public:
  explicit IllConditionedRegression(double t)
      : std::runtime_error("ill-conditioned regression at t = " + std::to_string(t)), t_step(t) {}
  double t_step;
};

struct RegressionBasis {
  int degree = 3;  // polynomials in the current W2 level
  bool use_exp_feature = false;
  double kappa = 0.0, nu = 0.0;  // feature e^{kappa w + nu t}
  int size() const { return (degree + 1) * (use_exp_feature ? 2 : 1); }
  void fill_row(double t, double w, double* row) const;
  std::string describe() const;
};
RegressionBasis default_basis(const ProblemSpec& spec);

struct LsmcOptions {
  double max_normal_cond = 1e12;  // condition cap on the normal equations
};

// Backward least-squares Monte Carlo regression on the ensemble's W2 paths.
// At each step alpha(t_i) is the regression estimate of the conditional
// expectation of alpha(t_{i+1}) plus the drift increment; beta(t_i) is the
// covariation estimate alpha(t_{i+1}) dW2 / h. The terminal condition is
// pathwise exact.
BsdeSolution solve_bsde_lsmc(const ProblemSpec& spec, const MatrixPath& p1, const MatrixPath& p2,
                             const MatrixPath& theta, const TimeGrid& grid,
                             const PathEnsemble& ensemble, const RegressionBasis& basis,
                             double epsilon = 0.0, const LsmcOptions& opts = {});

}  // namespace lqpi
