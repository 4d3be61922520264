#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lqpi/coefficients.hpp"
#include "lqpi/grid.hpp"
#include "lqpi/linalg.hpp"

namespace lqpi {

using MatrixFn = std::function<Matrix(double)>;

MatrixFn constant_matrix(Matrix M);
MatrixFn zero_matrix(int rows, int cols);

// Full coefficient set of the controlled linear dynamics and the quadratic
// cost. Deterministic blocks are functions of t; the inhomogeneous data
// b, sigma1, sigma2, q, rho and the terminal datum g are coefficient
// processes adapted to W2. Immutable after construction; safe to share
// across workers.
struct ProblemSpec {
  int n = 1;  // state dimension
  int m = 1;  // control dimension
  double T = 1.0;

  MatrixFn A, C1, C2;  // n x n
  MatrixFn B, D1, D2;  // n x m
  MatrixFn Q;          // n x n, symmetric
  MatrixFn S;          // m x n
  MatrixFn R;          // m x m, symmetric
  Matrix G;            // n x n, symmetric constant

  CoefficientProcess b, sigma1, sigma2, q;  // dim n
  CoefficientProcess rho;                   // dim m
  CoefficientProcess g;                     // dim n, read at t = T

  // copy with all inhomogeneous data zeroed (the J^0 problem)
  ProblemSpec homogeneous() const;
};

struct Diagnostic {
  std::string field;
  double t = 0.0;
  std::string message;
};

// Sample-scale validation: symmetry of Q, R, G, dimension consistency, and
// finiteness/boundedness of all coefficients at the grid nodes. Returns an
// empty list iff the spec passes.
std::vector<Diagnostic> validate_spec(const ProblemSpec& spec, const TimeGrid& grid);

// Built-in scenarios: "section5", "psd_scalar", "psd_random",
// "indefinite_unbounded". Deterministic in (name, params).
ProblemSpec builtin_scenario(const std::string& name,
                             const std::map<std::string, double>& params = {});

std::vector<std::string> builtin_scenario_names();

}  // namespace lqpi
