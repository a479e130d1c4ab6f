// SPDX-License-Identifier: Apache-2.0
#include "projlab/angle.hpp"

#include <algorithm>
#include <ostream>

#include "projlab/error.hpp"
#include "projlab/linalg.hpp"
#include "projlab/report.hpp"

namespace projlab {

AngleValue cos_angle(const Projector& p1, const Projector& p2, const PairProjector& p12,
                     const AscentOptions& opts) {
  const NormedSpace& space = p1.space();
  const NormCertificate a = operator_norm(p1.op() * (p2.op() - p12.op), space, opts);
  const NormCertificate b = operator_norm(p2.op() * (p1.op() - p12.op), space, opts);
  return {std::max(a.lower, b.lower), std::max(a.upper, b.upper), a.exact && b.exact};
}

double friedrichs_cos(const SubspaceBasis& a, const SubspaceBasis& b, const NormedSpace& space) {
  if (!space.hilbert())
    throw InapplicableError("Friedrichs angle needs the Euclidean norm (p = 2, unit weights)");
  if (a.empty() || b.empty()) return 0.0;
  const SubspaceBasis meet = intersect_ranges(a, b);
  Matrix qa = a.orthonormal();
  if (!meet.empty()) {
    const Matrix& qw = meet.orthonormal();
    const Matrix deflated = qa - qw * (qw.transpose() * qa);
    qa = orthonormal_columns(deflated, 1e-8);
    // Deflation removes exactly dim(meet) directions.
    if (qa.cols() > a.size() - meet.size()) qa = column_block(qa, 0, a.size() - meet.size());
  }
  if (qa.cols() == 0) return 0.0;
  return spectral_norm(qa.transpose() * b.orthonormal());
}

void AngleTable::set(std::size_t j1, std::size_t j2, AngleValue v) {
  cells_.at(j1 * n_ + j2) = v;
  cells_.at(j2 * n_ + j1) = v;
}

double AngleTable::max_upper() const {
  double m = 0.0;
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = a + 1; b < n_; ++b) m = std::max(m, at(a, b).upper);
  return m;
}

AngleTable angle_table(const ProjectorFamily& family, const AscentOptions& opts) {
  AngleTable t(family.size());
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = a + 1; b < family.size(); ++b)
      t.set(a, b, cos_angle(family[a], family[b], family.pair(a, b), opts));
  return t;
}

CommutatorCheck verify_commutator_bound(const Projector& p1, const Projector& p2,
                                        const PairProjector& p12, const Matrix& s,
                                        std::optional<double> beta, const AscentOptions& opts) {
  const NormedSpace& space = p1.space();
  CommutatorCheck out;
  out.cos = cos_angle(p1, p2, p12, opts).upper;
  if (out.cos >= 1.0) throw InapplicableError("commutator bound needs cos < 1");
  out.beta = beta.value_or(std::max(p1.norm().upper, p2.norm().upper));
  const Matrix id = Matrix::identity(space.dim());
  const Matrix comm = p1.op() * p2.op() - p2.op() * p1.op();
  out.lhs = operator_norm(comm * s, space, opts).lower;
  const double r1 = operator_norm((id - p1.op()) * s, space, opts).upper;
  const double r2 = operator_norm((id - p2.op()) * s, space, opts).upper;
  const double c = out.cos;
  out.rhs = (out.beta + out.beta * out.beta + c) * c / (1.0 - c) * (r1 + r2);
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

void write_angles_csv(std::ostream& out, const AngleTable& table,
                      const std::optional<AngleTable>& friedrichs) {
  out << "j1,j2,cos_lower,cos_upper,exact";
  if (friedrichs) out << ",friedrichs";
  out << '\n';
  for (std::size_t a = 0; a < table.size(); ++a) {
    for (std::size_t b = a + 1; b < table.size(); ++b) {
      const AngleValue& v = table.at(a, b);
      out << a + 1 << ',' << b + 1 << ',' << format_double(v.lower) << ','
          << format_double(v.upper) << ',' << (v.exact ? 1 : 0);
      if (friedrichs) out << ',' << format_double(friedrichs->at(a, b).upper);
      out << '\n';
    }
  }
}

}  // namespace projlab
