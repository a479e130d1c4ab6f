// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "projlab/matrix.hpp"
#include "projlab/normed_space.hpp"

namespace projlab {

// Compatibility identities Q P_j = Q are accepted up to this residual in the
// spectral norm.
inline constexpr double kCompatibilityTolerance = 1e-8;

// Linearly independent vectors of R^dim; empty means the zero subspace.
class SubspaceBasis {
 public:
  SubspaceBasis(std::size_t dim, std::vector<Vector> vectors);
  static SubspaceBasis from_columns(const Matrix& columns);
  static SubspaceBasis zero(std::size_t dim) { return SubspaceBasis(dim, {}); }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  bool empty() const noexcept { return vectors_.empty(); }
  const std::vector<Vector>& vectors() const noexcept { return vectors_; }

  Matrix columns() const { return Matrix::from_columns(dim_, vectors_); }
  // Orthonormal columns spanning the same subspace.
  const Matrix& orthonormal() const noexcept { return orthonormal_; }

 private:
  std::size_t dim_;
  std::vector<Vector> vectors_;
  Matrix orthonormal_;
};

// Idempotent operator with its range and kernel.
class Projector {
 public:
  // Checks idempotence and derives range/kernel from the matrix.
  static Projector from_matrix(Matrix op, const NormedSpace& space);

  const Matrix& op() const noexcept { return op_; }
  const SubspaceBasis& range() const noexcept { return range_; }
  const SubspaceBasis& kernel() const noexcept { return kernel_; }
  const NormCertificate& norm() const noexcept { return norm_; }
  const NormedSpace& space() const noexcept { return space_; }
  // Symmetric matrix: the l2-orthogonal projector onto its range.
  bool symmetric() const noexcept { return symmetric_; }

 private:
  Projector(Matrix op, SubspaceBasis range, SubspaceBasis kernel, NormedSpace space);

  Matrix op_;
  SubspaceBasis range_;
  SubspaceBasis kernel_;
  NormedSpace space_;
  NormCertificate norm_;
  bool symmetric_ = false;

  friend Projector make_orthogonal_projector(const SubspaceBasis&, const NormedSpace&);
  friend Projector make_oblique_projector(const SubspaceBasis&, const SubspaceBasis&,
                                          const NormedSpace&);
};

// |P^2 - P|_2 <= 1e-10 (1 + |P|_2^2)
bool is_idempotent(const Matrix& p);

Projector make_orthogonal_projector(const SubspaceBasis& basis, const NormedSpace& space);
Projector make_oblique_projector(const SubspaceBasis& range, const SubspaceBasis& kernel,
                                 const NormedSpace& space);

// Orthonormal basis of span(a) ∩ span(b), from the null space of [Qa, -Qb].
SubspaceBasis intersect_ranges(const SubspaceBasis& a, const SubspaceBasis& b);

// The P_{j1,j2} of a pair: a projector onto Im(P_j1) ∩ Im(P_j2) with
// P_{j1,j2} P_j1 = P_{j1,j2} and P_{j1,j2} P_j2 = P_{j1,j2}.
struct PairProjector {
  Matrix op;
  std::size_t first = 0;   // 0-based
  std::size_t second = 1;  // 0-based
  double residual_left = 0.0;
  double residual_right = 0.0;
  SubspaceBasis range = SubspaceBasis::zero(1);
};

struct AutoOrthogonal {};
struct ExplicitKernel {
  SubspaceBasis kernel;
};
using PairMode = std::variant<AutoOrthogonal, ExplicitKernel>;

// Throws CompatibilityError when either residual exceeds kCompatibilityTolerance.
PairProjector make_pair_projector(const Projector& p1, const Projector& p2,
                                  const PairMode& mode = AutoOrthogonal{},
                                  std::pair<std::size_t, std::size_t> indices = {0, 1});

enum class ConsistencyLevel { weak, full };

struct ConsistencyCertificate {
  Matrix global_op;                // P_{1..n}
  std::vector<double> residuals;   // |P_{1..n} P_j - P_{1..n}|_2
  ConsistencyLevel level = ConsistencyLevel::weak;
  // Full level: every subset of size >= 2 (0-based, ascending) -> its projector.
  std::map<std::vector<std::size_t>, Matrix> subset_table;
};

// |Q P - Q|_2
double compatibility_residual(const Matrix& q, const Matrix& p);

}  // namespace projlab
