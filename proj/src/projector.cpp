// SPDX-License-Identifier: Apache-2.0
#include "projlab/projector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "projlab/error.hpp"
#include "projlab/linalg.hpp"

namespace projlab {
namespace {

std::vector<Vector> columns_of(const Matrix& m) {
  std::vector<Vector> out;
  out.reserve(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) out.push_back(m.column(j));
  return out;
}

Matrix symmetrized(const Matrix& m) {
  Matrix s = m + m.transpose();
  s *= 0.5;
  return s;
}

bool symmetric_matrix(const Matrix& m) {
  const double scale = std::max(1.0, m.max_abs());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::fabs(m(i, j) - m(j, i)) > 1e-12 * scale) return false;
  return true;
}

std::string pair_label(std::pair<std::size_t, std::size_t> idx) {
  return "(" + std::to_string(idx.first + 1) + "," + std::to_string(idx.second + 1) + ")";
}

}  // namespace

SubspaceBasis::SubspaceBasis(std::size_t dim, std::vector<Vector> vectors)
    : dim_(dim), vectors_(std::move(vectors)), orthonormal_(dim, 0) {
  for (const auto& v : vectors_)
    if (v.size() != dim_)
      throw DimensionError("basis vector of length " + std::to_string(v.size()) +
                           " in dimension " + std::to_string(dim_));
  if (vectors_.empty()) return;
  if (vectors_.size() > dim_) throw RankError("more basis vectors than the dimension");
  const Matrix cols = Matrix::from_columns(dim_, vectors_);
  const Svd svd = jacobi_svd(cols);
  const std::size_t rank = numerical_rank(svd.sigma);
  if (rank != vectors_.size())
    throw RankError("basis of " + std::to_string(vectors_.size()) + " vectors has numerical rank " +
                    std::to_string(rank));
  orthonormal_ = column_block(svd.u, 0, rank);
}

SubspaceBasis SubspaceBasis::from_columns(const Matrix& columns) {
  return SubspaceBasis(columns.rows(), columns_of(columns));
}

bool is_idempotent(const Matrix& p) {
  const double n2 = spectral_norm(p);
  return spectral_norm(p * p - p) <= 1e-10 * (1.0 + n2 * n2);
}

double compatibility_residual(const Matrix& q, const Matrix& p) { return spectral_norm(q * p - q); }

Projector::Projector(Matrix op, SubspaceBasis range, SubspaceBasis kernel, NormedSpace space)
    : op_(std::move(op)),
      range_(std::move(range)),
      kernel_(std::move(kernel)),
      space_(std::move(space)) {
  norm_ = operator_norm(op_, space_);
  // Range vectors are fixed by P, so a nonzero projector has norm >= 1.
  if (!range_.empty() && norm_.lower < 1.0) {
    norm_.lower = 1.0;
    norm_.upper = std::max(norm_.upper, 1.0);
    norm_.exact = agrees(norm_.lower, norm_.upper);
  }
  symmetric_ = symmetric_matrix(op_);
  // A nonzero symmetric idempotent on a Hilbert space has norm exactly 1;
  // the numerical value differs from it only by rounding.
  if (symmetric_ && space_.hilbert() && !range_.empty() && norm_.upper - 1.0 <= 1e-12)
    norm_ = NormCertificate::exact_value(1.0);
}

Projector Projector::from_matrix(Matrix op, const NormedSpace& space) {
  if (!op.square() || op.rows() != space.dim())
    throw DimensionError("projector matrix does not match the space dimension");
  if (!is_idempotent(op)) throw Error("matrix is not idempotent");
  SubspaceBasis range = SubspaceBasis::from_columns(orthonormal_columns(op));
  SubspaceBasis kernel = SubspaceBasis::from_columns(null_space(op));
  return Projector(std::move(op), std::move(range), std::move(kernel), space);
}

Projector make_orthogonal_projector(const SubspaceBasis& basis, const NormedSpace& space) {
  const std::size_t d = space.dim();
  if (basis.dim() != d) throw DimensionError("basis dimension does not match the space");
  if (basis.empty())
    return Projector(Matrix(d, d), basis, SubspaceBasis::from_columns(Matrix::identity(d)), space);
  const Matrix& q = basis.orthonormal();
  Matrix p = symmetrized(q * q.transpose());
  SubspaceBasis kernel = SubspaceBasis::from_columns(null_space(q.transpose()));
  return Projector(std::move(p), basis, std::move(kernel), space);
}

Projector make_oblique_projector(const SubspaceBasis& range, const SubspaceBasis& kernel,
                                 const NormedSpace& space) {
  const std::size_t d = space.dim();
  if (range.dim() != d || kernel.dim() != d)
    throw DimensionError("range/kernel dimension does not match the space");
  if (range.size() + kernel.size() != d)
    throw ComplementError("range and kernel dimensions " + std::to_string(range.size()) + " + " +
                          std::to_string(kernel.size()) + " do not sum to " + std::to_string(d));
  if (range.empty()) return Projector(Matrix(d, d), range, kernel, space);
  if (kernel.empty()) return Projector(Matrix::identity(d), range, kernel, space);

  const Matrix stacked = hstack(range.orthonormal(), kernel.orthonormal());
  const Svd svd = jacobi_svd(stacked);
  if (svd.sigma.back() <= kRankTolerance * svd.sigma.front())
    throw ComplementError("range and kernel are not complementary");
  // P = Qr * (first r rows of [Qr Qk]^-1)
  const Matrix inv = solve(stacked, Matrix::identity(d));
  Matrix top(range.size(), d);
  for (std::size_t i = 0; i < range.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) top(i, j) = inv(i, j);
  return Projector(range.orthonormal() * top, range, kernel, space);
}

SubspaceBasis intersect_ranges(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.dim() != b.dim()) throw DimensionError("intersecting subspaces of different dimension");
  const std::size_t d = a.dim();
  if (a.empty() || b.empty()) return SubspaceBasis::zero(d);
  const Matrix& qa = a.orthonormal();
  const Matrix stacked = hstack(qa, b.orthonormal() * -1.0);
  const Matrix null = null_space(stacked);
  if (null.cols() == 0) return SubspaceBasis::zero(d);
  Matrix top(a.size(), null.cols());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < null.cols(); ++j) top(i, j) = null(i, j);
  const Matrix vectors = orthonormal_columns(qa * top);
  return SubspaceBasis::from_columns(vectors);
}

PairProjector make_pair_projector(const Projector& p1, const Projector& p2, const PairMode& mode,
                                  std::pair<std::size_t, std::size_t> indices) {
  const NormedSpace& space = p1.space();
  const std::size_t d = space.dim();
  if (p2.space().dim() != d) throw DimensionError("pair of projectors on different spaces");

  SubspaceBasis meet = intersect_ranges(p1.range(), p2.range());
  Matrix op;
  if (const auto* explicit_kernel = std::get_if<ExplicitKernel>(&mode)) {
    op = make_oblique_projector(meet, explicit_kernel->kernel, space).op();
  } else if (meet.empty()) {
    op = Matrix(d, d);
  } else {
    const Matrix& q = meet.orthonormal();
    op = symmetrized(q * q.transpose());
  }

  PairProjector out;
  out.first = indices.first;
  out.second = indices.second;
  out.residual_left = compatibility_residual(op, p1.op());
  out.residual_right = compatibility_residual(op, p2.op());
  out.op = std::move(op);
  out.range = std::move(meet);
  const double worst = std::max(out.residual_left, out.residual_right);
  if (worst > kCompatibilityTolerance)
    throw CompatibilityError("pair " + pair_label(indices) +
                                 ": intersection projector violates Q P_j = Q (residual " +
                                 std::to_string(worst) + ")",
                             {indices.first, indices.second}, worst);
  return out;
}

}  // namespace projlab
