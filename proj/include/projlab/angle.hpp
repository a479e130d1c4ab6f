// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "projlab/family.hpp"
#include "projlab/matrix.hpp"
#include "projlab/normed_space.hpp"
#include "projlab/projector.hpp"

namespace projlab {

// Cosine of the angle between projections,
//   max(|P1 (P2 - P12)|, |P2 (P1 - P12)|),
// as an interval when the ambient norm is only bracketed. Not clamped at 1.
struct AngleValue {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = true;
};

AngleValue cos_angle(const Projector& p1, const Projector& p2, const PairProjector& p12,
                     const AscentOptions& opts = {});

// Cosine of the Friedrichs angle between span(a) and span(b); Euclidean
// spaces only (throws InapplicableError otherwise).
double friedrichs_cos(const SubspaceBasis& a, const SubspaceBasis& b, const NormedSpace& space);

class AngleTable {
 public:
  explicit AngleTable(std::size_t n) : n_(n), cells_(n * n) {}

  std::size_t size() const noexcept { return n_; }
  const AngleValue& at(std::size_t j1, std::size_t j2) const { return cells_.at(j1 * n_ + j2); }
  void set(std::size_t j1, std::size_t j2, AngleValue v);

  // Largest off-diagonal upper end; 0 for n = 1.
  double max_upper() const;

 private:
  std::size_t n_;
  std::vector<AngleValue> cells_;
};

// Requires certified pair projectors for all pairs.
AngleTable angle_table(const ProjectorFamily& family, const AscentOptions& opts = {});

struct CommutatorCheck {
  double lhs = 0.0;  // |(P1 P2 - P2 P1) S|, lower end
  double rhs = 0.0;  // ((beta + beta^2 + c) c / (1 - c)) (|(I-P1)S| + |(I-P2)S|), upper ends
  double cos = 0.0;
  double beta = 0.0;
  bool holds = false;
};

// Evaluates both sides of the commutator estimate for a compatible pair.
// Throws InapplicableError when the cosine is >= 1.
CommutatorCheck verify_commutator_bound(const Projector& p1, const Projector& p2,
                                        const PairProjector& p12, const Matrix& s,
                                        std::optional<double> beta = {},
                                        const AscentOptions& opts = {});

// j1,j2,cos_lower,cos_upper,exact[,friedrichs]; indices 1-based.
void write_angles_csv(std::ostream& out, const AngleTable& table,
                      const std::optional<AngleTable>& friedrichs = {});

}  // namespace projlab
