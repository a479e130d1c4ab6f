// SPDX-License-Identifier: Apache-2.0
#include "projlab/normed_space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "projlab/error.hpp"
#include "projlab/kernels.hpp"
#include "projlab/linalg.hpp"

namespace projlab {
namespace {

double unit_p_norm(std::span<const double> v, double p) {
  const auto& k = kernels::active();
  if (p == kInfinity) return k.abs_max(v.data(), v.size());
  if (p == 1.0) return k.abs_sum(v.data(), v.size());
  if (p == 2.0) {
    const double scale = k.abs_max(v.data(), v.size());
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x / scale) * (x / scale);
    return scale * std::sqrt(s);
  }
  const double scale = k.abs_max(v.data(), v.size());
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::pow(std::fabs(x) / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

// d/dv |v|_p for unit weights, v != 0.
Vector unit_p_norm_gradient(std::span<const double> v, double p, double norm) {
  Vector g(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = std::fabs(v[i]) / norm;
    g[i] = std::copysign(std::pow(r, p - 1.0), v[i]);
  }
  return g;
}

// Uniform double in [0,1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double ratio(const Matrix& a, std::span<const double> v, double p) {
  const double nv = unit_p_norm(v, p);
  if (nv == 0.0) return 0.0;
  return unit_p_norm(matvec(a, v), p) / nv;
}

void normalize(Vector& v, double p) {
  const double nv = unit_p_norm(v, p);
  if (nv > 0.0)
    for (double& x : v) x /= nv;
}

// Gradient of |Av|/|v| at a unit-norm v.
Vector ratio_gradient(const Matrix& a, const Matrix& at, const Vector& v, double p) {
  const Vector av = matvec(a, v);
  const double nav = unit_p_norm(av, p);
  const std::size_t n = v.size();
  Vector g(n, 0.0);
  if (nav == 0.0) return g;
  const Vector gav = matvec(at, unit_p_norm_gradient(av, p, nav));
  const Vector gv = unit_p_norm_gradient(v, p, 1.0);
  for (std::size_t i = 0; i < n; ++i) g[i] = gav[i] - nav * gv[i];
  return g;
}

double ascend(const Matrix& a, const Matrix& at, Vector v, double p, const AscentOptions& opts) {
  normalize(v, p);
  double value = ratio(a, v, p);
  double step = 1.0;
  for (std::size_t it = 0; it < opts.iterations; ++it) {
    Vector g = ratio_gradient(a, at, v, p);
    double gn = 0.0;
    for (double x : g) gn += x * x;
    gn = std::sqrt(gn);
    if (!(gn > 0.0)) break;
    bool improved = false;
    double next_value = value;
    Vector trial(v.size());
    for (double t = std::min(1.0, 2.0 * step); t > 1e-16; t *= 0.5) {
      for (std::size_t i = 0; i < v.size(); ++i) trial[i] = v[i] + t * g[i] / gn;
      normalize(trial, p);
      next_value = ratio(a, trial, p);
      if (next_value > value) {
        step = t;
        improved = true;
        break;
      }
    }
    if (!improved) break;
    const double change = (next_value - value) / std::max(value, 1e-300);
    v = trial;
    value = next_value;
    if (change < opts.rel_change) break;
  }
  return value;
}

}  // namespace

NormedSpace::NormedSpace(std::size_t dim, double p, std::vector<double> weights)
    : dim_(dim), p_(p), weights_(std::move(weights)) {
  if (dim_ == 0) throw ValidationError("space.dim", "must be at least 1");
  if (!(p_ >= 1.0)) throw ValidationError("space.p", "must be >= 1 or inf");
  if (weights_.empty()) weights_.assign(dim_, 1.0);
  if (weights_.size() != dim_)
    throw ValidationError("space.weights", "expected " + std::to_string(dim_) + " entries, got " +
                                               std::to_string(weights_.size()));
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w))
      throw ValidationError("space.weights", "weights must be positive and finite");
  unit_weights_ = std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 1.0; });
}

bool agrees(double lower, double upper) { return upper - lower <= 1e-12 * (1.0 + upper); }

Operator::Operator(Matrix m, NormedSpace s) : entries(std::move(m)), space(std::move(s)) {
  if (!entries.square() || entries.rows() != space.dim())
    throw DimensionError("operator is " + std::to_string(entries.rows()) + "x" +
                         std::to_string(entries.cols()) + ", space has dimension " +
                         std::to_string(space.dim()));
}

double vector_norm(std::span<const double> v, const NormedSpace& space) {
  if (v.size() != space.dim())
    throw DimensionError("vector of length " + std::to_string(v.size()) + " in a space of dimension " +
                         std::to_string(space.dim()));
  if (space.unit_weights()) return unit_p_norm(v, space.p());
  Vector scaled(v.size());
  const auto& w = space.weights();
  for (std::size_t i = 0; i < v.size(); ++i)
    scaled[i] = v[i] * (space.infinite_p() ? w[i] : std::pow(w[i], 1.0 / space.p()));
  return unit_p_norm(scaled, space.p());
}

Matrix to_unit_weights(const Matrix& a, const NormedSpace& space) {
  if (space.unit_weights()) return a;
  const auto& w = space.weights();
  Matrix b = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double ratio = w[i] / w[j];
      b(i, j) *= space.infinite_p() ? ratio : std::pow(ratio, 1.0 / space.p());
    }
  return b;
}

double max_column_sum(const Matrix& a) {
  Vector acc(a.cols(), 0.0);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < a.rows(); ++i) k.abs_accumulate(a.row(i).data(), acc.data(), a.cols());
  return acc.empty() ? 0.0 : *std::max_element(acc.begin(), acc.end());
}

double max_row_sum(const Matrix& a) {
  double m = 0.0;
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, k.abs_sum(a.row(i).data(), a.cols()));
  return m;
}

double riesz_thorin_bound(const Matrix& b, double p) {
  const double one = max_column_sum(b);
  const double inf = max_row_sum(b);
  if (one == 0.0 || inf == 0.0) return 0.0;
  return std::pow(one, 1.0 / p) * std::pow(inf, 1.0 - 1.0 / p);
}

double operator_norm_upper(const Matrix& a, const NormedSpace& space) {
  if (!a.square() || a.rows() != space.dim()) throw DimensionError("operator/space dimension mismatch");
  const Matrix b = to_unit_weights(a, space);
  if (space.p() == 1.0) return max_column_sum(b);
  if (space.infinite_p()) return max_row_sum(b);
  if (space.p() == 2.0) return spectral_norm(b);
  return riesz_thorin_bound(b, space.p());
}

NormCertificate estimate_norm_ascent(const Matrix& a, const NormedSpace& space,
                                     const AscentOptions& opts) {
  if (!a.square() || a.rows() != space.dim()) throw DimensionError("operator/space dimension mismatch");
  const Matrix b = to_unit_weights(a, space);
  const double p = space.p();
  const double upper = space.infinite_p() ? max_row_sum(b) : riesz_thorin_bound(b, p);
  if (upper == 0.0) return NormCertificate::exact_value(0.0);

  const std::size_t n = space.dim();
  const Matrix bt = b.transpose();
  double lower = 0.0;
  // Coordinate vectors are cheap candidates and do not consume randomness.
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n, 0.0);
    e[j] = 1.0;
    lower = std::max(lower, ratio(b, e, p));
  }
  std::mt19937_64 rng(opts.seed);
  for (std::size_t s = 0; s < opts.starts; ++s) {
    Vector v(n);
    for (double& x : v) x = standard_normal(rng);
    lower = std::max(lower, ascend(b, bt, std::move(v), p, opts));
  }
  const double hi = std::max(upper, lower);
  return {lower, hi, agrees(lower, hi)};
}

NormCertificate estimate_norm_ascent(const Operator& a, std::size_t starts, std::uint64_t seed) {
  AscentOptions opts;
  opts.starts = starts;
  opts.seed = seed;
  return estimate_norm_ascent(a.entries, a.space, opts);
}

NormCertificate operator_norm(const Matrix& a, const NormedSpace& space, const AscentOptions& opts) {
  if (space.closed_form_norm()) return NormCertificate::exact_value(operator_norm_upper(a, space));
  return estimate_norm_ascent(a, space, opts);
}

NormCertificate operator_norm(const Operator& a, const AscentOptions& opts) {
  return operator_norm(a.entries, a.space, opts);
}

}  // namespace projlab
