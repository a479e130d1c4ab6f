// SPDX-License-Identifier: Apache-2.0
#include "projlab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "projlab/error.hpp"
#include "projlab/report.hpp"

namespace projlab {
namespace {

double angle_term(double c, double beta) { return (c + beta + beta * beta) * c / (1.0 - c); }

bool beta_in_range(double beta, std::size_t n) {
  return n < 2 || (beta >= 0.0 && beta < 1.0 + 1.0 / static_cast<double>(n - 1));
}

std::string pair_label(std::size_t a, std::size_t b) {
  return "(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")";
}

}  // namespace

AveragedRate averaged_rate(const AngleTable& cosines, const WeightVector& alphas, double beta) {
  const std::size_t n = cosines.size();
  if (alphas.size() != n) throw DimensionError("alphas length differs from the family size");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!(cosines.at(a, b).upper < 1.0))
        throw InapplicableError("cosine >= 1 for pair " + pair_label(a, b));

  AveragedRate out;
  out.per_index.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double c = (1.0 - alphas[j]) * beta;
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) c += angle_term(cosines.at(j, k).upper, beta) * 2.0 * alphas[k];
    out.per_index[j] = c;
  }
  out.r = *std::max_element(out.per_index.begin(), out.per_index.end());
  out.r_min = *std::min_element(out.per_index.begin(), out.per_index.end());
  out.pass = out.r < 1.0;
  out.C = out.pass ? (1.0 + beta) / (1.0 - out.r) : std::numeric_limits<double>::infinity();
  out.reason = out.pass ? "r < 1" : "r >= 1";
  return out;
}

AveragedRate averaged_rate(const ProjectorFamily& family, const WeightVector& alphas, double beta,
                           const AscentOptions& opts) {
  if (beta + 1e-12 < family.norm_bound())
    throw ValidationError("beta", "below the largest projector norm bound");
  return averaged_rate(angle_table(family, opts), alphas, beta);
}

double uniform_rate_function(double beta, std::size_t n, double x) {
  const double a = static_cast<double>(n - 1) / static_cast<double>(n);
  return a * beta + 2.0 * a * (x + beta + beta * beta) * x / (1.0 - x);
}

GammaSolution solve_gamma(double beta, std::size_t n) {
  if (n < 2) throw InapplicableError("solve_gamma needs at least two projectors");
  if (!beta_in_range(beta, n)) throw InapplicableError("beta out of range");
  const double a = static_cast<double>(n - 1) / static_cast<double>(n);
  const double c0 = 1.0 - a * beta;
  const double b = 2.0 * a * (beta + beta * beta) + c0;
  // Positive root of 2a x^2 + b x - c0 = 0 without cancellation.
  GammaSolution s;
  s.gamma_prime = 2.0 * c0 / (b + std::sqrt(b * b + 8.0 * a * c0));
  s.gamma = s.gamma_prime / 2.0;
  s.r = uniform_rate_function(beta, n, s.gamma);
  s.C = (1.0 + beta) / (1.0 - s.r);
  return s;
}

double product_deviation_bound(double beta, double gamma, double C, double r, std::size_t m,
                               std::size_t i) {
  const double di = static_cast<double>(i);
  const double dm = static_cast<double>(m);
  return std::pow(beta, dm) * C * std::pow(r, di) +
         2.0 * gamma * (dm - 1.0) * std::pow(beta, dm - 2.0) * (std::pow(2.0 + beta, di) - 1.0);
}

QualityBudget gamma_for_quality(double beta, std::size_t n, std::size_t m, double q) {
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("q", "must lie in (0, 1)");
  if (m < 2 || m < n) throw ValidationError("m", "window length must be >= max(n, 2)");
  const GammaSolution g = solve_gamma(beta, n);
  QualityBudget out;
  out.gamma1 = g.gamma;
  out.r = g.r;
  out.C = g.C;
  const double lead = std::pow(beta, static_cast<double>(m)) * g.C;
  std::size_t i0 = 0;
  while (lead * std::pow(g.r, static_cast<double>(i0)) > q / 2.0) {
    if (++i0 > 1000000) throw InapplicableError("no i0 reaches q/2");
  }
  out.i0 = i0;
  const double growth = std::pow(2.0 + beta, static_cast<double>(i0)) - 1.0;
  const double denom = 2.0 * static_cast<double>(m - 1) *
                       std::pow(beta, static_cast<double>(m) - 2.0) * growth;
  if (!std::isfinite(denom)) throw InapplicableError("quality budget underflows: (2 + beta)^i0 overflows");
  out.gamma2 = denom > 0.0 ? (q / 2.0) / denom : std::numeric_limits<double>::infinity();
  double gamma = std::min(out.gamma1, out.gamma2);
  // Guard the q/2 + q/2 split against rounding in the last place.
  while (gamma > 0.0 && product_deviation_bound(beta, gamma, g.C, g.r, m, i0) > q)
    gamma = std::nextafter(gamma, 0.0);
  out.gamma = gamma;
  return out;
}

RandomParams random_params(double beta, std::size_t n, const std::vector<double>& mu,
                           std::optional<double> lambda) {
  if (mu.size() != n) throw ValidationError("mu", "length must equal the number of projectors");
  double sum = 0.0;
  for (double v : mu) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("mu", "entries must be positive");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw ValidationError("mu", "entries must sum to 1");
  RandomParams out;
  out.freq = 1.0;
  for (std::size_t j = 0; j < n; ++j) out.freq *= static_cast<double>(j + 1) * mu[j];
  out.lambda = lambda.value_or(0.5 * out.freq);
  if (!(out.lambda > 0.0 && out.lambda <= 1.0)) throw ValidationError("lambda", "must lie in (0, 1]");
  const double dn = static_cast<double>(n);
  const double q = std::pow(0.99 * std::pow(beta, -dn * (1.0 - out.lambda)), 1.0 / out.lambda);
  out.q = std::min(q, 0.999);
  return out;
}

double cyclic_envelope(double q, std::size_t i) { return std::pow(q, static_cast<double>(i)); }

double quasi_periodic_envelope(double beta, double q, std::size_t m, std::size_t i) {
  return std::pow(beta, static_cast<double>(m) - 1.0) * std::pow(q, static_cast<double>(i / m));
}

double random_envelope(double beta, double q, std::size_t n, double lambda, double norm_i_minus_p,
                       std::size_t i) {
  const double dn = static_cast<double>(n);
  const double factor = std::pow(beta, dn * (1.0 - lambda)) * std::pow(q, lambda);
  if (!(factor < 1.0)) throw InapplicableError("random envelope is not contractive");
  return norm_i_minus_p * std::pow(beta, dn - 1.0) * std::pow(factor, static_cast<double>(i / n));
}

bool CriteriaReport::all_pass() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(),
                     [](const HypothesisResult& h) { return h.pass; });
}

const HypothesisResult* CriteriaReport::find(const std::string& name) const {
  for (const auto& h : hypotheses)
    if (h.name == name) return &h;
  return nullptr;
}

namespace {

HypothesisResult budget_row(const std::string& name, const QualityBudget& b, double q,
                            double max_cos) {
  HypothesisResult h{name, max_cos <= b.gamma, "", q, b.C, b.gamma};
  h.reason = "max cos " + format_double(max_cos) + (h.pass ? " <= " : " > ") + "gamma " +
             format_double(b.gamma);
  return h;
}

}  // namespace

CriteriaReport evaluate_criteria(const ProjectorFamily& family, const CriteriaRequest& request) {
  for (const auto& name : request.names)
    if (std::find(all_criteria().begin(), all_criteria().end(), name) == all_criteria().end())
      throw ValidationError("criteria", "unknown criterion '" + name + "'");

  CriteriaReport rep;
  rep.n = family.size();
  rep.q = request.q;
  rep.m = request.m;
  rep.beta = request.beta.value_or(family.norm_bound());
  if (rep.beta + 1e-12 < family.norm_bound())
    throw ValidationError("beta", "below the largest projector norm bound");
  rep.cos_table = family.size() > 1 ? angle_table(family, request.ascent) : AngleTable(1);
  rep.max_cos = rep.cos_table.max_upper();
  rep.weakly_consistent = family.consistency().has_value();

  auto wants = [&](const char* name) {
    return std::find(request.names.begin(), request.names.end(), name) != request.names.end();
  };
  std::vector<std::string> rows;
  for (const char* name : {"averaged", "averaged_uniform", "cyclic", "quasi_periodic", "random"}) {
    const std::string s = name;
    if (wants(name) || (s == "averaged_uniform" && wants("averaged"))) rows.push_back(s);
  }

  if (rep.n == 1) {
    for (const auto& name : rows) rep.hypotheses.push_back({name, true, "single projector", {}, {}, {}});
    return rep;
  }
  if (!beta_in_range(rep.beta, rep.n)) {
    for (const auto& name : rows)
      rep.hypotheses.push_back({name, false, "beta out of range", {}, {}, {}});
    return rep;
  }

  for (const auto& name : rows) {
    if (name == "averaged") {
      const WeightVector alphas = family.alphas_or_uniform();
      try {
        rep.averaged = averaged_rate(rep.cos_table, alphas, rep.beta);
        const auto& a = *rep.averaged;
        HypothesisResult h{name, a.pass, a.reason + " (r=" + format_double(a.r) + ")", a.r, {}, {}};
        if (a.pass) h.C = a.C;
        rep.hypotheses.push_back(h);
      } catch (const InapplicableError& e) {
        rep.hypotheses.push_back({name, false, e.what(), {}, {}, {}});
      }
      continue;
    }
    if (name == "averaged_uniform") {
      rep.uniform = solve_gamma(rep.beta, rep.n);
      const auto& g = *rep.uniform;
      HypothesisResult h{name, rep.max_cos <= g.gamma, "", g.r, g.C, g.gamma};
      h.reason = "max cos " + format_double(rep.max_cos) + (h.pass ? " <= " : " > ") + "gamma " +
                 format_double(g.gamma);
      rep.hypotheses.push_back(h);
      continue;
    }
    if (!rep.weakly_consistent) {
      rep.hypotheses.push_back({name, false, "family not certified weakly consistent", {}, {}, {}});
      continue;
    }
    if (name == "cyclic") {
      rep.cyclic = gamma_for_quality(rep.beta, rep.n, std::max<std::size_t>(rep.n, 2), request.q);
      rep.hypotheses.push_back(budget_row(name, *rep.cyclic, request.q, rep.max_cos));
    } else if (name == "quasi_periodic") {
      if (request.m < rep.n || request.m < 2) {
        rep.hypotheses.push_back({name, false, "window length m not configured (need m >= n)", {}, {}, {}});
        continue;
      }
      rep.quasi_periodic = gamma_for_quality(rep.beta, rep.n, request.m, request.q);
      rep.hypotheses.push_back(budget_row(name, *rep.quasi_periodic, request.q, rep.max_cos));
    } else if (name == "random") {
      if (request.mu.empty()) {
        rep.hypotheses.push_back({name, false, "measure mu not configured", {}, {}, {}});
        continue;
      }
      rep.random = random_params(rep.beta, rep.n, request.mu, request.lambda);
      rep.random_budget =
          gamma_for_quality(rep.beta, rep.n, std::max<std::size_t>(rep.n, 2), rep.random->q);
      rep.hypotheses.push_back(budget_row(name, *rep.random_budget, rep.random->q, rep.max_cos));
    }
  }
  return rep;
}

}  // namespace projlab
