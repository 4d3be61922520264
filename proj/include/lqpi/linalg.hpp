#pragma once

#include <Eigen/Dense>

namespace lqpi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

bool is_finite(const Matrix& M);
bool is_symmetric(const Matrix& M, double tol);

// Moore-Penrose pseudoinverse via SVD. Singular values below
// tol * sigma_max are treated as zero; tol < 0 selects the default cutoff
// eps * max(rows, cols). The zero matrix maps to the zero matrix.
Matrix pinv(const Matrix& M, double tol = -1.0);

// Numerical rank under the same cutoff convention as pinv.
int svd_rank(const Matrix& M, double tol = -1.0);

// (M + M^T)/2; throws std::invalid_argument on non-square input.
Matrix symmetrize(const Matrix& M);

// Smallest eigenvalue of a symmetric matrix; throws std::invalid_argument
// when the input is asymmetric beyond sym_tol.
double min_eigenvalue(const Matrix& M, double sym_tol = 1e-10);

}  // namespace linalg
}  // namespace lqpi
