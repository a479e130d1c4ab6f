// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "projlab/family.hpp"
#include "projlab/matrix.hpp"

namespace projlab {

enum class ScheduleKind { averaged, cyclic, quasi_periodic, random };

const char* to_string(ScheduleKind kind);

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::cyclic;
  std::size_t steps = 100;
  std::size_t m = 0;                  // quasi-periodic window length
  std::vector<std::size_t> tau;       // quasi-periodic prefix (0-based symbols)
  std::vector<double> mu;             // random measure
  std::optional<std::uint64_t> seed;  // random draws / quasi-periodic generator

  friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

// A concrete index sequence tau(1..steps), stored 0-based.
struct Schedule {
  ScheduleKind kind = ScheduleKind::cyclic;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::size_t> tau;
  std::vector<double> mu;
  std::uint64_t seed = 0;
};

// Cyclic: 1,2,..,n,1,2,... Quasi-periodic: the given prefix (extended
// periodically when shorter than steps, in which case wrap-around windows are
// checked too) or, without a prefix, a seeded sequence built so that every
// length-m window covers all symbols. Random: i.i.d. draws from mu.
// Window violations throw ScheduleError with the 0-based window start.
Schedule make_schedule(const ScheduleSpec& spec, std::size_t n);

// count i.i.d. draws from mu; the first k draws do not depend on count.
std::vector<std::size_t> draw_random_tau(const std::vector<double>& mu, std::uint64_t seed,
                                         std::size_t count);

// |A(tau,k)| / k for k = 1..k_max, where A counts the non-overlapping length-n
// blocks (positions (l-1)n+1 .. ln) that are permutations of all symbols.
// Only complete blocks inside tau are counted; k_max is clipped accordingly.
std::vector<double> block_frequencies(const std::vector<std::size_t>& tau, std::size_t n,
                                      std::size_t k_max);

// block_frequencies over a random schedule, drawing more symbols from the same
// seed when k_max n exceeds the stored prefix. Throws ScheduleError otherwise.
std::vector<double> lln_statistics(const Schedule& schedule, std::size_t k_max);

// Smallest k (1-based) such that freq[k'] >= lambda for every k' >= k in the
// series; empty when the last entry is below lambda.
std::optional<std::size_t> stable_index(const std::vector<double>& freq, double lambda);

struct StepRecord {
  std::size_t step = 0;
  double deviation = 0.0;
  std::optional<double> envelope;
  bool violated = false;
};

struct IterationTrace {
  std::vector<StepRecord> steps;
  Matrix limit_op;
  std::optional<std::size_t> k_tau;
  std::vector<double> block_stats;

  std::size_t violations() const;
  double final_deviation() const;
};

// Envelope value at step i, or nothing where no bound applies.
using Envelope = std::function<std::optional<double>(std::size_t)>;

inline constexpr double kEnvelopeSlack = 1e-9;
inline constexpr double kDivergenceThreshold = 1e6;

enum class LimitMode { certified_limit, estimate_limit };

// Cauchy limit of T^i with T = sum_k alpha_k P_k: stops when
// |T^(i+1) - T^i|_2 <= 1e-13; DivergenceError after 1e5 steps.
Matrix estimate_averaged_limit(const ProjectorFamily& family, const WeightVector& alphas);

// Records |T^i - T^inf| (ambient upper certificate) for i = 0..steps. The
// certified mode uses the family's consistency certificate as T^inf.
IterationTrace run_averaged(const ProjectorFamily& family, const WeightVector& alphas,
                            std::size_t steps, LimitMode mode, const Envelope& envelope = {});

// E(S) = sum_j alpha_j |(I - P_j) S| (upper certificates).
double energy(const ProjectorFamily& family, const WeightVector& alphas, const Matrix& s);

// Records |P_tau(i) ... P_tau(1) - P_{1..n}| for i = 0..tau.size(). The family
// must be weakly consistent (certified on demand). For random schedules with a
// lambda, block statistics and k_tau are recorded and the envelope is only
// consulted from step n k_tau on.
IterationTrace run_product(const ProjectorFamily& family, const Schedule& schedule,
                           const Envelope& envelope = {}, std::optional<double> lambda = {});

}  // namespace projlab
