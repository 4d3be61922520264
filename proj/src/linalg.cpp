#include "lqpi/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lqpi {
namespace linalg {

bool is_finite(const Matrix& M) { return M.allFinite(); }

bool is_symmetric(const Matrix& M, double tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

namespace {

double default_cutoff(const Matrix& M) {
  return std::numeric_limits<double>::epsilon() *
         static_cast<double>(std::max(M.rows(), M.cols()));
}

}  // namespace

Matrix pinv(const Matrix& M, double tol) {
  if (M.size() == 0) return Matrix(M.cols(), M.rows());
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cut = (tol < 0 ? default_cutoff(M) : tol) * smax;
  Vector inv = Vector::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int svd_rank(const Matrix& M, double tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cut = (tol < 0 ? default_cutoff(M) : tol) * smax;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut && sv(i) > 0.0) ++r;
  return r;
}

Matrix symmetrize(const Matrix& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("symmetrize: matrix must be square");
  return 0.5 * (M + M.transpose());
}

double min_eigenvalue(const Matrix& M, double sym_tol) {
  if (!is_symmetric(M, sym_tol))
    throw std::invalid_argument("min_eigenvalue: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(M), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace linalg
}  // namespace lqpi
