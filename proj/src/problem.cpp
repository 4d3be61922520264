#include "lqpi/problem.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "lqpi/rng.hpp"

namespace lqpi {

MatrixFn constant_matrix(Matrix M) {
  return [M = std::move(M)](double) { return M; };
}

MatrixFn zero_matrix(int rows, int cols) {
  return [rows, cols](double) { return Matrix::Zero(rows, cols); };
}

ProblemSpec ProblemSpec::homogeneous() const {
  ProblemSpec h = *this;
  h.b = CoefficientProcess::zero(n);
  h.sigma1 = CoefficientProcess::zero(n);
  h.sigma2 = CoefficientProcess::zero(n);
  h.q = CoefficientProcess::zero(n);
  h.rho = CoefficientProcess::zero(m);
  h.g = CoefficientProcess::zero(n);
  return h;
}

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kMagnitudeCap = 1e10;  // essential-boundedness proxy for deterministic blocks

struct Checker {
  const TimeGrid& grid;
  std::vector<Diagnostic>& out;
  std::set<std::string> reported;

  void add(const std::string& field, double t, const std::string& msg) {
    if (reported.insert(field + "#" + msg.substr(0, 12)).second)
      out.push_back({field, t, msg});
  }

  void matrix_fn(const std::string& name, const MatrixFn& f, int rows, int cols, bool symmetric) {
    if (!f) {
      add(name, grid.t0, "missing coefficient function");
      return;
    }
    for (int i = 0; i <= grid.n_steps; ++i) {
      const double t = grid.t(i);
      const Matrix M = f(t);
      if (M.rows() != rows || M.cols() != cols) {
        add(name, t, "dimension mismatch: got " + std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()) + ", expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
        return;
      }
      if (!linalg::is_finite(M)) {
        add(name, t, "non-finite entry");
        return;
      }
      if (M.cwiseAbs().maxCoeff() > kMagnitudeCap) {
        add(name, t, "entry magnitude exceeds boundedness cap");
        return;
      }
      if (symmetric && !linalg::is_symmetric(M, kSymTol)) {
        add(name, t, "not symmetric to 1e-12");
        return;
      }
    }
  }

  void process(const std::string& name, const CoefficientProcess& c, int dim) {
    if (c.dim() != dim) {
      add(name, grid.t0, "dimension mismatch: got " + std::to_string(c.dim()) + ", expected " +
                             std::to_string(dim));
      return;
    }
    if (c.kind() == CoefficientProcess::Kind::PathFunctional) return;  // probed on sampled paths only
    for (int i = 0; i <= grid.n_steps; ++i) {
      const double t = grid.t(i);
      for (double w : {0.0, -1.0, 1.0}) {
        const Vector v = c.eval(t, w);
        if (v.size() != dim) {
          add(name, t, "evaluation shape mismatch");
          return;
        }
        if (!v.allFinite()) {
          add(name, t, "non-finite evaluation");
          return;
        }
      }
    }
  }
};

ProblemSpec make_section5() {
  ProblemSpec s;
  s.n = 1;
  s.m = 1;
  s.T = 1.0;
  const double root2 = std::sqrt(2.0);
  s.A = constant_matrix(Matrix::Constant(1, 1, -1.0));
  s.B = constant_matrix(Matrix::Constant(1, 1, 1.0));
  s.C1 = zero_matrix(1, 1);
  s.C2 = constant_matrix(Matrix::Constant(1, 1, root2));
  s.D1 = zero_matrix(1, 1);
  s.D2 = zero_matrix(1, 1);
  s.Q = zero_matrix(1, 1);
  s.S = zero_matrix(1, 1);
  s.R = zero_matrix(1, 1);
  s.G = Matrix::Constant(1, 1, 1.0);

  CoefficientProcess::ExponentialFamily fam;
  fam.kappa = root2;
  fam.nu = -2.0;
  fam.direction = Vector::Constant(1, 1.0);
  // integrable blow-up at t = 1; the datum itself is 0 at the terminal time
  fam.profile = [](double t) { return t < 1.0 ? 1.0 / std::sqrt(1.0 - t) : 0.0; };
  fam.tail_integral = [](double t) { return t < 1.0 ? 2.0 * std::sqrt(1.0 - t) : 0.0; };
  s.b = CoefficientProcess::exponential(fam);

  s.sigma1 = CoefficientProcess::constant(Vector::Constant(1, 1.0));
  s.sigma2 = CoefficientProcess::zero(1);
  s.q = CoefficientProcess::zero(1);
  s.rho = CoefficientProcess::zero(1);
  s.g = CoefficientProcess::zero(1);
  return s;
}

ProblemSpec make_psd_scalar(double delta) {
  ProblemSpec s;
  s.n = 1;
  s.m = 1;
  s.T = 1.0;
  s.A = constant_matrix(Matrix::Constant(1, 1, -0.5));
  s.B = constant_matrix(Matrix::Constant(1, 1, 1.0));
  s.C1 = constant_matrix(Matrix::Constant(1, 1, 0.3));
  s.C2 = constant_matrix(Matrix::Constant(1, 1, 0.4));
  s.D1 = zero_matrix(1, 1);
  s.D2 = zero_matrix(1, 1);
  s.Q = constant_matrix(Matrix::Constant(1, 1, 1.0));
  s.S = zero_matrix(1, 1);
  s.R = constant_matrix(Matrix::Constant(1, 1, delta));
  s.G = Matrix::Constant(1, 1, 1.0);
  s.b = CoefficientProcess::zero(1);
  s.sigma1 = CoefficientProcess::zero(1);
  s.sigma2 = CoefficientProcess::zero(1);
  s.q = CoefficientProcess::zero(1);
  s.rho = CoefficientProcess::zero(1);
  s.g = CoefficientProcess::zero(1);
  return s;
}

Matrix random_matrix(std::uint64_t seed, std::uint64_t tag, int rows, int cols, double lo, double hi) {
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      M(i, j) = rng::uniform(seed, tag, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), lo, hi);
  return M;
}

ProblemSpec make_psd_random(std::uint64_t seed, int n, int m, double delta) {
  ProblemSpec s;
  s.n = n;
  s.m = m;
  s.T = 1.0;
  s.A = constant_matrix(random_matrix(seed, 1, n, n, -0.6, 0.6));
  s.B = constant_matrix(random_matrix(seed, 2, n, m, -0.8, 0.8));
  s.C1 = constant_matrix(random_matrix(seed, 3, n, n, -0.4, 0.4));
  s.C2 = constant_matrix(random_matrix(seed, 4, n, n, -0.4, 0.4));
  s.D1 = constant_matrix(random_matrix(seed, 5, n, m, -0.3, 0.3));
  s.D2 = constant_matrix(random_matrix(seed, 6, n, m, -0.3, 0.3));

  const Matrix L = random_matrix(seed, 7, m, m, -0.5, 0.5);
  const Matrix R0 = delta * Matrix::Identity(m, m) + L * L.transpose();
  const Matrix S0 = random_matrix(seed, 8, m, n, -0.3, 0.3);
  const Matrix M0 = random_matrix(seed, 9, n, n, -0.5, 0.5);
  // Q - S^T R^-1 S = M0 M0^T >= 0 by construction
  const Matrix Q0 = S0.transpose() * R0.inverse() * S0 + M0 * M0.transpose();
  const Matrix N0 = random_matrix(seed, 10, n, n, -0.5, 0.5);

  s.Q = constant_matrix(0.5 * (Q0 + Q0.transpose()));
  s.S = constant_matrix(S0);
  s.R = constant_matrix(0.5 * (R0 + R0.transpose()));
  s.G = N0 * N0.transpose();

  s.b = CoefficientProcess::constant(random_matrix(seed, 11, n, 1, -0.3, 0.3));
  s.sigma1 = CoefficientProcess::constant(random_matrix(seed, 12, n, 1, -0.3, 0.3));
  s.sigma2 = CoefficientProcess::constant(random_matrix(seed, 13, n, 1, -0.3, 0.3));
  s.q = CoefficientProcess::constant(random_matrix(seed, 14, n, 1, -0.3, 0.3));
  s.rho = CoefficientProcess::constant(random_matrix(seed, 15, m, 1, -0.3, 0.3));
  s.g = CoefficientProcess::constant(random_matrix(seed, 16, n, 1, -0.3, 0.3));
  return s;
}

ProblemSpec make_indefinite_unbounded() {
  ProblemSpec s;
  s.n = 1;
  s.m = 1;
  s.T = 1.0;
  s.A = zero_matrix(1, 1);
  s.B = constant_matrix(Matrix::Constant(1, 1, 1.0));
  s.C1 = zero_matrix(1, 1);
  s.C2 = zero_matrix(1, 1);
  s.D1 = zero_matrix(1, 1);
  s.D2 = zero_matrix(1, 1);
  s.Q = zero_matrix(1, 1);
  s.S = zero_matrix(1, 1);
  s.R = constant_matrix(Matrix::Constant(1, 1, -1.0));
  s.G = Matrix::Zero(1, 1);
  s.b = CoefficientProcess::zero(1);
  s.sigma1 = CoefficientProcess::zero(1);
  s.sigma2 = CoefficientProcess::zero(1);
  s.q = CoefficientProcess::zero(1);
  s.rho = CoefficientProcess::zero(1);
  s.g = CoefficientProcess::zero(1);
  return s;
}

double param_or(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

}  // namespace

std::vector<Diagnostic> validate_spec(const ProblemSpec& spec, const TimeGrid& grid) {
  std::vector<Diagnostic> out;
  Checker ck{grid, out, {}};
  if (spec.n < 1 || spec.m < 1) {
    out.push_back({"dimensions", grid.t0, "n and m must be positive"});
    return out;
  }
  ck.matrix_fn("A", spec.A, spec.n, spec.n, false);
  ck.matrix_fn("C1", spec.C1, spec.n, spec.n, false);
  ck.matrix_fn("C2", spec.C2, spec.n, spec.n, false);
  ck.matrix_fn("B", spec.B, spec.n, spec.m, false);
  ck.matrix_fn("D1", spec.D1, spec.n, spec.m, false);
  ck.matrix_fn("D2", spec.D2, spec.n, spec.m, false);
  ck.matrix_fn("Q", spec.Q, spec.n, spec.n, true);
  ck.matrix_fn("S", spec.S, spec.m, spec.n, false);
  ck.matrix_fn("R", spec.R, spec.m, spec.m, true);
  ck.matrix_fn("G", constant_matrix(spec.G), spec.n, spec.n, true);
  ck.process("b", spec.b, spec.n);
  ck.process("sigma1", spec.sigma1, spec.n);
  ck.process("sigma2", spec.sigma2, spec.n);
  ck.process("q", spec.q, spec.n);
  ck.process("rho", spec.rho, spec.m);
  ck.process("g", spec.g, spec.n);
  return out;
}

ProblemSpec builtin_scenario(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "section5") return make_section5();
  if (name == "psd_scalar") return make_psd_scalar(param_or(params, "delta", 1.0));
  if (name == "psd_random")
    return make_psd_random(static_cast<std::uint64_t>(param_or(params, "seed", 1.0)),
                           static_cast<int>(param_or(params, "n", 2.0)),
                           static_cast<int>(param_or(params, "m", 2.0)),
                           param_or(params, "delta", 0.5));
  if (name == "indefinite_unbounded") return make_indefinite_unbounded();
  throw std::invalid_argument("builtin_scenario: unknown scenario '" + name + "'");
}

std::vector<std::string> builtin_scenario_names() {
  return {"section5", "psd_scalar", "psd_random", "indefinite_unbounded"};
}

}  // namespace lqpi
