#pragma once

// Small dense linear-algebra helpers shared by the solvers.

#include <Eigen/Dense>
#include <complex>

namespace stabnet::linalg {

using Matrix = Eigen::MatrixXcd;

/// Orthonormal basis (columns) of ker M. Singular values at or below
/// rel_cutoff * max(sigma_max, scale) count as zero; a zero matrix has the full kernel.
/// Pass scale when M is a restriction M = C V of a larger map C, so that roundoff in
/// a numerically zero restriction is not mistaken for rank.
Matrix null_space(const Matrix& m, double rel_cutoff = 1e-10, double scale = 0.0);

/// Orthonormal basis of the column span of M, same cutoff rule.
Matrix range(const Matrix& m, double rel_cutoff = 1e-10);

/// Numerical rank of M with the same cutoff rule.
Eigen::Index rank(const Matrix& m, double rel_cutoff = 1e-10);

/// h^{-1/2} on the support of a Hermitian positive semidefinite h; eigenvalues at or
/// below abs_cutoff are treated as zero.
Matrix inverse_sqrt_psd(const Matrix& h, double abs_cutoff);

/// Orthogonal projection onto the support of a Hermitian positive semidefinite h.
Matrix support_projection(const Matrix& h, double abs_cutoff);

}  // namespace stabnet::linalg
