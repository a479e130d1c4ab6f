// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "projlab/matrix.hpp"

namespace projlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// R^dim with the weighted p-norm (sum_i w_i |v_i|^p)^(1/p), or max_i w_i |v_i|
// when p is infinite.
class NormedSpace {
 public:
  explicit NormedSpace(std::size_t dim, double p = 2.0, std::vector<double> weights = {});

  std::size_t dim() const noexcept { return dim_; }
  double p() const noexcept { return p_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  bool infinite_p() const noexcept { return p_ == kInfinity; }
  bool unit_weights() const noexcept { return unit_weights_; }
  // p in {1, 2, inf}: induced norms have closed forms after reweighting.
  bool closed_form_norm() const noexcept { return p_ == 1.0 || p_ == 2.0 || infinite_p(); }
  bool hilbert() const noexcept { return p_ == 2.0 && unit_weights_; }

  friend bool operator==(const NormedSpace&, const NormedSpace&) = default;

 private:
  std::size_t dim_;
  double p_;
  std::vector<double> weights_;
  bool unit_weights_;
};

// Two-sided bound on an induced operator norm.
struct NormCertificate {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;

  static NormCertificate exact_value(double v) { return {v, v, true}; }
};

// Tolerance for calling an interval exact.
bool agrees(double lower, double upper);

// A square matrix tied to the space it acts on.
struct Operator {
  Operator(Matrix m, NormedSpace s);
  Matrix entries;
  NormedSpace space;
};

struct AscentOptions {
  std::size_t starts = 16;
  std::uint64_t seed = 0;
  std::size_t iterations = 200;
  double rel_change = 1e-10;
};

double vector_norm(std::span<const double> v, const NormedSpace& space);

// Exact for p in {1, 2, inf} (any weights); otherwise ascent lower bound and
// Riesz-Thorin upper bound.
NormCertificate operator_norm(const Operator& a, const AscentOptions& opts = {});
NormCertificate operator_norm(const Matrix& a, const NormedSpace& space,
                              const AscentOptions& opts = {});

// Upper end only; skips the ascent for general p.
double operator_norm_upper(const Matrix& a, const NormedSpace& space);

// Multi-start normalized-gradient ascent of |Av|/|v|. Deterministic in seed,
// and the first k starts do not depend on the total number of starts.
NormCertificate estimate_norm_ascent(const Operator& a, std::size_t starts, std::uint64_t seed);
NormCertificate estimate_norm_ascent(const Matrix& a, const NormedSpace& space,
                                     const AscentOptions& opts);

// D A D^-1 with D = diag(w^(1/p)) (diag(w) for p = inf): the same induced
// norm, measured with unit weights.
Matrix to_unit_weights(const Matrix& a, const NormedSpace& space);

double max_column_sum(const Matrix& a);
double max_row_sum(const Matrix& a);
double riesz_thorin_bound(const Matrix& unit_weighted, double p);

}  // namespace projlab
