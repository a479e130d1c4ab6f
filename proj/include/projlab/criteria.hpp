// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "projlab/angle.hpp"
#include "projlab/family.hpp"

namespace projlab {

// Rate of the averaged iteration T = sum_k alpha_k P_k.
//   c_j = (1 - alpha_j) beta + sum_{k != j} ((c_jk + beta + beta^2) c_jk / (1 - c_jk)) 2 alpha_k
// r is the maximum over j (every c_j must be bounded for the energy argument);
// r_min is the minimum, kept for comparison only.
struct AveragedRate {
  double r = 0.0;
  double r_min = 0.0;
  std::vector<double> per_index;
  double C = 0.0;  // (1 + beta) / (1 - r); infinite when r >= 1
  bool pass = false;
  std::string reason;
};

// Throws InapplicableError when some cosine (upper end) is >= 1.
AveragedRate averaged_rate(const AngleTable& cosines, const WeightVector& alphas, double beta);
// Also checks that beta dominates every projector norm (ValidationError "beta").
AveragedRate averaged_rate(const ProjectorFamily& family, const WeightVector& alphas, double beta,
                           const AscentOptions& opts = {});

// f(x) = a beta + 2a (x + beta + beta^2) x / (1 - x), a = (n - 1) / n: the rate
// when every cosine is at most x and the weights are uniform.
double uniform_rate_function(double beta, std::size_t n, double x);

struct GammaSolution {
  double gamma_prime = 0.0;  // root of f(x) = 1 in (0, 1)
  double gamma = 0.0;        // gamma_prime / 2
  double r = 0.0;            // f(gamma)
  double C = 0.0;            // (1 + beta) / (1 - r)
};

// Requires n >= 2 and 0 <= beta < 1 + 1/(n-1); InapplicableError otherwise.
GammaSolution solve_gamma(double beta, std::size_t n);

// beta^m C r^i + 2 gamma (m - 1) beta^(m-2) ((2 + beta)^i - 1)
double product_deviation_bound(double beta, double gamma, double C, double r, std::size_t m,
                               std::size_t i);

struct QualityBudget {
  double gamma = 0.0;   // min(gamma1, gamma2)
  double gamma1 = 0.0;  // from solve_gamma
  double gamma2 = 0.0;  // keeps the commutator term below q/2 at i0
  std::size_t i0 = 0;   // smallest i with beta^m C r^i <= q/2
  double r = 0.0;
  double C = 0.0;
};

// Angle budget under which every length-m product containing all n
// projectors lies within q of the common-range projector.
QualityBudget gamma_for_quality(double beta, std::size_t n, std::size_t m, double q);

struct RandomParams {
  double freq = 0.0;    // n! prod mu_j: chance that an n-block is a permutation
  double lambda = 0.0;  // required long-run fraction of permutation blocks
  double q = 0.0;       // per-permutation-block contraction
};

// lambda defaults to freq / 2. q = min((0.99 beta^(-n(1-lambda)))^(1/lambda), 0.999).
RandomParams random_params(double beta, std::size_t n, const std::vector<double>& mu,
                           std::optional<double> lambda = {});

double cyclic_envelope(double q, std::size_t i);
double quasi_periodic_envelope(double beta, double q, std::size_t m, std::size_t i);
// Throws InapplicableError when beta^(n(1-lambda)) q^lambda >= 1.
double random_envelope(double beta, double q, std::size_t n, double lambda, double norm_i_minus_p,
                       std::size_t i);

inline const std::vector<std::string>& all_criteria() {
  static const std::vector<std::string> names{"averaged", "cyclic", "quasi_periodic", "random"};
  return names;
}

struct CriteriaRequest {
  std::vector<std::string> names = all_criteria();
  double q = 0.5;                   // target contraction for cyclic / quasi-periodic
  std::optional<double> beta;       // defaults to the family norm bound
  std::size_t m = 0;                // quasi-periodic window; 0 = not configured
  std::vector<double> mu;           // random measure; empty = not configured
  std::optional<double> lambda;
  AscentOptions ascent;
};

struct HypothesisResult {
  std::string name;
  bool pass = false;
  std::string reason;
  std::optional<double> r_or_q;
  std::optional<double> C;
  std::optional<double> gamma;
};

struct CriteriaReport {
  std::size_t n = 0;
  double beta = 0.0;
  AngleTable cos_table{0};
  double max_cos = 0.0;
  bool weakly_consistent = false;
  std::optional<AveragedRate> averaged;
  std::optional<GammaSolution> uniform;
  std::optional<QualityBudget> cyclic;
  std::optional<QualityBudget> quasi_periodic;
  std::optional<RandomParams> random;
  std::optional<QualityBudget> random_budget;
  double q = 0.0;
  std::size_t m = 0;
  std::vector<HypothesisResult> hypotheses;

  bool all_pass() const;
  const HypothesisResult* find(const std::string& name) const;
};

// Evaluates the requested hypotheses. "averaged" also yields the
// "averaged_uniform" row. Cyclic, quasi-periodic and random rows require the
// family to carry a weak consistency certificate. A failing hypothesis is a
// result, not an error.
CriteriaReport evaluate_criteria(const ProjectorFamily& family, const CriteriaRequest& request);

}  // namespace projlab
