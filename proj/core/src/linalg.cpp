#include "stabnet/linalg.hpp"

#include <algorithm>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace stabnet::linalg {

namespace {

// Square upper factor R with R^H R = M^H M, so that ker R = ker M and the
// singular values agree; the SVD then runs on a matrix with few rows.
Matrix compress_rows(const Matrix& m) {
  if (m.rows() <= m.cols()) return m;
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
}

}  // namespace

Matrix null_space(const Matrix& m, double rel_cutoff, double scale) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  const Matrix r = compress_rows(m);
  // BDCSVD in Eigen 3.4.0 returns NaN singular values on some rank-deficient 0/1 matrices.
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = std::max(s.size() > 0 ? s(0) : 0.0, scale);
  if (smax == 0.0) return Matrix::Identity(n, n);
  Eigen::Index keep = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_cutoff * smax) ++keep;
  return svd.matrixV().rightCols(n - keep);
}

Matrix range(const Matrix& m, double rel_cutoff) {
  if (m.cols() == 0 || m.rows() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  Eigen::Index keep = 0;
  if (smax > 0.0)
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) > rel_cutoff * smax) ++keep;
  return svd.matrixU().leftCols(keep);
}

Eigen::Index rank(const Matrix& m, double rel_cutoff) { return range(m, rel_cutoff).cols(); }

Matrix inverse_sqrt_psd(const Matrix& h, double abs_cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto& ev = es.eigenvalues();
  Eigen::VectorXd scale(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) scale(k) = ev(k) > abs_cutoff ? 1.0 / std::sqrt(ev(k)) : 0.0;
  return es.eigenvectors() * scale.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix support_projection(const Matrix& h, double abs_cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto& ev = es.eigenvalues();
  Eigen::VectorXd scale(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) scale(k) = ev(k) > abs_cutoff ? 1.0 : 0.0;
  return es.eigenvectors() * scale.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace stabnet::linalg
