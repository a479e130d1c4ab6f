// SPDX-License-Identifier: Apache-2.0
#include "projlab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "projlab/error.hpp"
#include "projlab/linalg.hpp"
#include "projlab/normed_space.hpp"

namespace projlab {
namespace {

// 53-bit uniform in [0, 1), identical on every platform (unlike
// std::uniform_real_distribution).
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_symbols(const std::vector<std::size_t>& tau, std::size_t n) {
  for (std::size_t s : tau)
    if (s >= n) throw ValidationError("schedule.tau", "symbol out of range");
}

// First window start (0-based) whose symbols miss one of 0..n-1. With
// wrap = true the sequence is treated as periodic.
std::optional<std::size_t> first_bad_window(const std::vector<std::size_t>& tau, std::size_t n,
                                            std::size_t m, bool wrap) {
  const std::size_t len = tau.size();
  const std::size_t starts = wrap ? len : (len >= m ? len - m + 1 : 0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t start = 0; start < starts; ++start) {
    std::fill(count.begin(), count.end(), 0);
    std::size_t covered = 0;
    for (std::size_t t = 0; t < m; ++t)
      if (count[tau[(start + t) % len]]++ == 0) ++covered;
    if (covered < n) return start;
  }
  return std::nullopt;
}

// Seeded sequence with every length-m window covering all n symbols. Each
// symbol has a deadline (last position + m - 1); a random choice is kept only
// if the earliest-deadline-first completion stays feasible.
std::vector<std::size_t> generate_quasi_periodic(std::size_t n, std::size_t m, std::size_t steps,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> deadline(n, m - 1);
  std::vector<std::size_t> tau;
  tau.reserve(steps);
  auto feasible = [&](std::size_t pos, std::size_t pick) {
    std::vector<std::size_t> d = deadline;
    d[pick] = pos + m;
    std::sort(d.begin(), d.end());
    for (std::size_t k = 0; k < n; ++k)
      if (d[k] < pos + 1 + k) return false;
    return true;
  };
  for (std::size_t pos = 0; pos < steps; ++pos) {
    auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    pick = std::min(pick, n - 1);
    if (!feasible(pos, pick))
      pick = static_cast<std::size_t>(std::min_element(deadline.begin(), deadline.end()) -
                                      deadline.begin());
    deadline[pick] = pos + m;
    tau.push_back(pick);
  }
  return tau;
}

double deviation_norm(const Matrix& prod, const Matrix& limit, const NormedSpace& space) {
  return operator_norm_upper(prod - limit, space);
}

void check_divergence(const Matrix& prod, std::size_t step) {
  if (prod.frobenius_norm() > kDivergenceThreshold && spectral_norm(prod) > kDivergenceThreshold)
    throw DivergenceError("product norm exceeded 1e6 at step " + std::to_string(step), step);
}

StepRecord make_record(std::size_t step, double deviation, std::optional<double> envelope) {
  StepRecord r{step, deviation, envelope, false};
  if (envelope) r.violated = deviation > *envelope + kEnvelopeSlack;
  return r;
}

}  // namespace

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::averaged: return "averaged";
    case ScheduleKind::cyclic: return "cyclic";
    case ScheduleKind::quasi_periodic: return "quasi_periodic";
    case ScheduleKind::random: return "random";
  }
  return "unknown";
}

std::vector<std::size_t> draw_random_tau(const std::vector<double>& mu, std::uint64_t seed,
                                         std::size_t count) {
  std::vector<double> cdf(mu.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) cdf[j] = (acc += mu[j]);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> tau(count);
  for (auto& s : tau) {
    const double u = uniform01(rng) * acc;
    s = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    s = std::min(s, mu.size() - 1);
  }
  return tau;
}

Schedule make_schedule(const ScheduleSpec& spec, std::size_t n) {
  if (n == 0) throw ValidationError("projectors", "family must not be empty");
  if (spec.steps == 0) throw ValidationError("schedule.steps", "must be positive");
  Schedule s;
  s.kind = spec.kind;
  s.n = n;
  s.m = spec.m;
  switch (spec.kind) {
    case ScheduleKind::averaged:
      break;
    case ScheduleKind::cyclic:
      s.tau.resize(spec.steps);
      for (std::size_t i = 0; i < spec.steps; ++i) s.tau[i] = i % n;
      break;
    case ScheduleKind::quasi_periodic: {
      if (spec.m < n) throw ValidationError("schedule.m", "window length must be at least n");
      if (!spec.tau.empty()) {
        check_symbols(spec.tau, n);
        const bool wrap = spec.steps > spec.tau.size();
        if (wrap && spec.tau.size() < n)
          throw ScheduleError("tau prefix shorter than the number of projectors", 0);
        if (auto bad = first_bad_window(spec.tau, n, spec.m, wrap))
          throw ScheduleError("window starting at index " + std::to_string(*bad + 1) +
                                  " does not contain every projector",
                              *bad);
        s.tau.resize(spec.steps);
        for (std::size_t i = 0; i < spec.steps; ++i) s.tau[i] = spec.tau[i % spec.tau.size()];
      } else {
        if (!spec.seed) throw ValidationError("schedule.seed", "seed required");
        s.seed = *spec.seed;
        s.tau = generate_quasi_periodic(n, spec.m, spec.steps, s.seed);
      }
      break;
    }
    case ScheduleKind::random: {
      if (!spec.seed) throw ValidationError("schedule.seed", "seed required");
      if (spec.mu.size() != n) throw ValidationError("schedule.mu", "length must equal n");
      double sum = 0.0;
      for (double v : spec.mu) {
        if (!(v > 0.0) || !std::isfinite(v))
          throw ValidationError("schedule.mu", "entries must be positive");
        sum += v;
      }
      if (std::fabs(sum - 1.0) > 1e-12) throw ValidationError("schedule.mu", "entries must sum to 1");
      s.mu = spec.mu;
      s.seed = *spec.seed;
      s.tau = draw_random_tau(s.mu, s.seed, spec.steps);
      break;
    }
  }
  return s;
}

std::vector<double> block_frequencies(const std::vector<std::size_t>& tau, std::size_t n,
                                      std::size_t k_max) {
  if (n == 0) return {};
  k_max = std::min(k_max, tau.size() / n);
  std::vector<double> freq(k_max);
  std::vector<char> seen(n);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < k_max; ++k) {
    std::fill(seen.begin(), seen.end(), 0);
    std::size_t distinct = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t sym = tau[k * n + t];
      if (sym < n && !seen[sym]) {
        seen[sym] = 1;
        ++distinct;
      }
    }
    if (distinct == n) ++hits;
    freq[k] = static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return freq;
}

std::vector<double> lln_statistics(const Schedule& schedule, std::size_t k_max) {
  if (schedule.kind != ScheduleKind::random)
    throw ScheduleError("block statistics need a random schedule", 0);
  const std::size_t need = k_max * schedule.n;
  if (schedule.tau.size() >= need) return block_frequencies(schedule.tau, schedule.n, k_max);
  return block_frequencies(draw_random_tau(schedule.mu, schedule.seed, need), schedule.n, k_max);
}

std::optional<std::size_t> stable_index(const std::vector<double>& freq, double lambda) {
  std::optional<std::size_t> k;
  for (std::size_t i = freq.size(); i-- > 0;) {
    if (freq[i] < lambda) break;
    k = i + 1;
  }
  return k;
}

std::size_t IterationTrace::violations() const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [](const StepRecord& r) { return r.violated; }));
}

double IterationTrace::final_deviation() const { return steps.empty() ? 0.0 : steps.back().deviation; }

namespace {

Matrix averaged_operator(const ProjectorFamily& family, const WeightVector& alphas) {
  if (alphas.size() != family.size()) throw DimensionError("alphas length differs from the family size");
  const std::size_t d = family.space().dim();
  Matrix t(d, d);
  for (std::size_t j = 0; j < family.size(); ++j) t += family[j].op() * alphas[j];
  return t;
}

}  // namespace

Matrix estimate_averaged_limit(const ProjectorFamily& family, const WeightVector& alphas) {
  const Matrix t = averaged_operator(family, alphas);
  Matrix power = t;
  constexpr std::size_t kBudget = 100000;
  for (std::size_t i = 1; i <= kBudget; ++i) {
    Matrix next = t * power;
    check_divergence(next, i + 1);
    const double change = spectral_norm(next - power);
    power = std::move(next);
    if (change <= 1e-13) return power;
  }
  throw DivergenceError("averaged iteration did not settle within 1e5 steps", kBudget);
}

IterationTrace run_averaged(const ProjectorFamily& family, const WeightVector& alphas,
                            std::size_t steps, LimitMode mode, const Envelope& envelope) {
  IterationTrace trace;
  if (mode == LimitMode::certified_limit) {
    if (!family.consistency())
      throw CompatibilityError("certified limit needs a weak consistency certificate", {}, 0.0);
    trace.limit_op = family.consistency()->global_op;
  } else {
    trace.limit_op = estimate_averaged_limit(family, alphas);
  }
  const Matrix t = averaged_operator(family, alphas);
  const NormedSpace& space = family.space();
  Matrix power = Matrix::identity(space.dim());
  trace.steps.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    if (i > 0) {
      power = t * power;
      check_divergence(power, i);
    }
    trace.steps.push_back(make_record(i, deviation_norm(power, trace.limit_op, space),
                                      envelope ? envelope(i) : std::nullopt));
  }
  return trace;
}

double energy(const ProjectorFamily& family, const WeightVector& alphas, const Matrix& s) {
  const Matrix id = Matrix::identity(family.space().dim());
  double e = 0.0;
  for (std::size_t j = 0; j < family.size(); ++j)
    e += alphas[j] * operator_norm_upper((id - family[j].op()) * s, family.space());
  return e;
}

IterationTrace run_product(const ProjectorFamily& family, const Schedule& schedule,
                           const Envelope& envelope, std::optional<double> lambda) {
  if (schedule.kind == ScheduleKind::averaged)
    throw ScheduleError("averaged schedules run through run_averaged", 0);
  check_symbols(schedule.tau, family.size());
  IterationTrace trace;
  trace.limit_op = family.consistency() ? family.consistency()->global_op
                                        : check_weak_consistency(family).global_op;
  const NormedSpace& space = family.space();
  const std::size_t n = family.size();

  std::size_t envelope_from = 0;
  if (schedule.kind == ScheduleKind::random) {
    trace.block_stats = block_frequencies(schedule.tau, n, schedule.tau.size() / n);
    if (lambda) {
      trace.k_tau = stable_index(trace.block_stats, *lambda);
      envelope_from = trace.k_tau ? *trace.k_tau * n : schedule.tau.size() + 1;
    }
  }

  Matrix prod = Matrix::identity(space.dim());
  trace.steps.reserve(schedule.tau.size() + 1);
  for (std::size_t i = 0; i <= schedule.tau.size(); ++i) {
    if (i > 0) {
      prod = family[schedule.tau[i - 1]].op() * prod;
      check_divergence(prod, i);
    }
    std::optional<double> env;
    if (envelope && i >= envelope_from) env = envelope(i);
    trace.steps.push_back(make_record(i, deviation_norm(prod, trace.limit_op, space), env));
  }
  return trace;
}

}  // namespace projlab
