// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "projlab/matrix.hpp"

namespace projlab {

// Rank decisions: singular values at or below this fraction of the largest
// one count as zero.
inline constexpr double kRankTolerance = 1e-10;

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
};

// Cyclic Jacobi on a symmetric matrix; sweeps until the off-diagonal mass is
// below rel_tol times the Frobenius norm.
SymmetricEigen jacobi_eigen(const Matrix& sym, double rel_tol = 1e-15);

// A = U diag(sigma) V^T, sigma descending. U is m x n with unit (or zero)
// columns, V is n x n orthogonal. One-sided (Hestenes) Jacobi.
struct Svd {
  std::vector<double> sigma;
  Matrix u;
  Matrix v;
};
Svd jacobi_svd(const Matrix& a);

// Largest singular value, from the top eigenvalue of A^T A.
double spectral_norm(const Matrix& a);

std::size_t numerical_rank(std::span<const double> sigma, double rel_tol = kRankTolerance);

// Orthonormal basis (as columns) of the column space of a.
Matrix orthonormal_columns(const Matrix& a, double rel_tol = kRankTolerance);

// Orthonormal basis (as columns) of the null space of a.
Matrix null_space(const Matrix& a, double rel_tol = kRankTolerance);

// x with a x = b for square a (LU, partial pivoting). Throws on exact singularity.
Matrix solve(const Matrix& a, const Matrix& b);

}  // namespace projlab
