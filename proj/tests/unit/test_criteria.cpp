// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "generators.hpp"
#include "oracles.hpp"
#include "projlab/criteria.hpp"
#include "projlab/error.hpp"
#include "projlab/report.hpp"

using namespace projlab;

namespace {

// Independent transcriptions of the rate formulas.
double rate_fn(double beta, double n, double x) {
  const double a = (n - 1) / n;
  return a * beta + 2 * a * (x + beta + beta * beta) * x / (1 - x);
}

// Root of rate_fn(x) = 1 on (0, 1) by bisection.
double gamma_prime_by_bisection(double beta, double n) {
  double lo = 0.0, hi = 1.0 - 1e-15;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (rate_fn(beta, n, mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

AngleTable uniform_table(std::size_t n, double c) {
  AngleTable t(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) t.set(a, b, {c, c, true});
  return t;
}

}  // namespace

TEST_SUITE("criteria") {
  TEST_CASE("averaged rate examples") {
    // All cosines vanish: r = (1 - 1/2) * 1 and C = 2 / (1 - 1/2).
    const auto zero = averaged_rate(uniform_table(2, 0.0), WeightVector::uniform(2), 1.0);
    CHECK(zero.r == 0.5);
    CHECK(zero.C == 4.0);
    CHECK(zero.pass);

    // r = 1/2 + (c + 2) c / (1 - c) at c = 0.1.
    const auto tenth = averaged_rate(uniform_table(2, 0.1), WeightVector::uniform(2), 1.0);
    CHECK(tenth.r == doctest::Approx(0.5 + 2.1 * 0.1 / 0.9).epsilon(1e-15));
    CHECK(tenth.r == doctest::Approx(0.7333).epsilon(1e-4));

    // beta >= 1 / (1 - min alpha) fails regardless of the angles.
    const WeightVector w({0.2, 0.8});
    const auto big = averaged_rate(uniform_table(2, 0.0), w, 1.0 / (1.0 - 0.2));
    CHECK_FALSE(big.pass);

    CHECK_THROWS_AS(averaged_rate(uniform_table(2, 1.0), WeightVector::uniform(2), 1.0), InapplicableError);
  }

  TEST_CASE("max over indices, min reported alongside") {
    AngleTable t(3);
    t.set(0, 1, {0.05, 0.05, true});
    t.set(0, 2, {0.0, 0.0, true});
    t.set(1, 2, {0.0, 0.0, true});
    const WeightVector w({0.5, 0.25, 0.25});
    const auto r = averaged_rate(t, w, 1.0);
    const double term = (0.05 + 2.0) * 0.05 / 0.95;
    const double c0 = 0.5 + term * 2 * 0.25;
    const double c1 = 0.75 + term * 2 * 0.5;
    const double c2 = 0.75;
    CHECK(r.per_index[0] == doctest::Approx(c0));
    CHECK(r.per_index[1] == doctest::Approx(c1));
    CHECK(r.per_index[2] == doctest::Approx(c2));
    CHECK(r.r == doctest::Approx(std::max({c0, c1, c2})));
    CHECK(r.r_min == doctest::Approx(std::min({c0, c1, c2})));
  }

  TEST_CASE("zero-angle rate equals max_j (1 - alpha_j) beta exactly") {
    gen::Rng rng(61);
    for (int t = 0; t < 50; ++t) {
      const std::size_t n = rng.index(2, 5);
      std::vector<double> a(n);
      double s = 0;
      for (double& x : a) s += (x = rng.uniform(0.1, 1.0));
      for (double& x : a) x /= s;
      double sum = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) sum += a[i];
      a.back() = 1.0 - sum;
      const double beta = rng.uniform(1.0, 1.5);
      const auto r = averaged_rate(uniform_table(n, 0.0), WeightVector(a), beta);
      double expected = 0;
      for (double x : a) expected = std::max(expected, (1 - x) * beta);
      CHECK(r.r == expected);
      if (r.pass) CHECK(r.C == (1 + beta) / (1 - r.r));
      if (r.pass) CHECK(beta < 1.0 / (1.0 - *std::max_element(a.begin(), a.end())));
    }
  }

  TEST_CASE("solve_gamma examples") {
    const auto g = solve_gamma(1.0, 2);
    CHECK(g.gamma_prime == doctest::Approx((-5.0 + std::sqrt(33.0)) / 4.0).epsilon(1e-14));
    CHECK(std::fabs(g.gamma_prime - (-5.0 + std::sqrt(33.0)) / 4.0) <= 1e-12);
    CHECK(g.gamma == doctest::Approx(0.0930703).epsilon(1e-6));
    // f reduces to 1/2 + (x + 2) x / (1 - x).
    const double r = 0.5 + (g.gamma + 2) * g.gamma / (1 - g.gamma);
    CHECK(g.r == doctest::Approx(r).epsilon(1e-14));
    CHECK(g.r == doctest::Approx(0.71479).epsilon(1e-5));
    CHECK(g.C == doctest::Approx(2.0 / (1.0 - r)).epsilon(1e-13));
    CHECK(g.C == doctest::Approx(7.0122).epsilon(1e-4));

    CHECK(solve_gamma(1.0, 2).gamma_prime > solve_gamma(1.0, 3).gamma_prime);
    CHECK_THROWS_AS(solve_gamma(2.0, 2), InapplicableError);
    CHECK_THROWS_AS(solve_gamma(1.5, 3), InapplicableError);
    CHECK_THROWS_AS(solve_gamma(1.0, 1), InapplicableError);
    // f(0) = a beta: the admissible beta stops at n / (n - 1).
    CHECK_NOTHROW(solve_gamma(1.49, 3));
    CHECK(uniform_rate_function(1.2, 4, 0.0) == doctest::Approx(0.75 * 1.2));
  }

  TEST_CASE("solve_gamma root property over random inputs") {
    gen::Rng rng(62);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = rng.index(2, 8);
      const double beta = rng.uniform(0.0, 1.0 + 1.0 / static_cast<double>(n - 1)) * 0.999;
      const auto g = solve_gamma(beta, n);
      CHECK(std::fabs(rate_fn(beta, static_cast<double>(n), g.gamma_prime) - 1.0) <= 1e-12);
      CHECK(rate_fn(beta, static_cast<double>(n), g.gamma) < 1.0);
      CHECK(g.gamma_prime == doctest::Approx(gamma_prime_by_bisection(beta, static_cast<double>(n))).epsilon(1e-10));
    }
  }

  TEST_CASE("product deviation bound") {
    CHECK(product_deviation_bound(1.2, 0.05, 3.0, 0.7, 3, 0) == doctest::Approx(std::pow(1.2, 3) * 3.0));
    const double v = product_deviation_bound(1.0, 0.0930703, 7.0122, 0.714787, 2, 3);
    CHECK(v == doctest::Approx(7.0122 * std::pow(0.714787, 3) + 2 * 0.0930703 * 26).epsilon(1e-12));
    CHECK(v == doctest::Approx(7.4008).epsilon(1e-4));
    CHECK(product_deviation_bound(1.1, 0.0, 5.0, 0.6, 4, 7) == doctest::Approx(std::pow(1.1, 4) * 5.0 * std::pow(0.6, 7)));
    // The commutator term grows with the number of window factors.
    CHECK(product_deviation_bound(1.0, 0.01, 2.0, 0.5, 4, 3) > product_deviation_bound(1.0, 0.01, 2.0, 0.5, 2, 3));
  }

  TEST_CASE("gamma_for_quality example") {
    const auto b = gamma_for_quality(1.0, 2, 2, 0.5);
    // Iterate C r^i <= q/2 with the solve_gamma constants.
    const auto g = solve_gamma(1.0, 2);
    std::size_t i0 = 0;
    while (g.C * std::pow(g.r, static_cast<double>(i0)) > 0.25) ++i0;
    CHECK(b.i0 == i0);
    CHECK(b.i0 == 10);
    CHECK(b.gamma2 == doctest::Approx(0.25 / (2 * (std::pow(3.0, 10) - 1))).epsilon(1e-14));
    CHECK(b.gamma2 == doctest::Approx(2.117e-6).epsilon(1e-3));
    CHECK(b.gamma <= b.gamma2);
    CHECK(b.gamma1 == g.gamma);
  }

  TEST_CASE("gamma_for_quality keeps the q/2 + q/2 split and is monotone") {
    gen::Rng rng(63);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = rng.index(2, 5);
      const std::size_t m = n + rng.index(0, 4);
      const double beta = rng.uniform(1.0, 1.0 + 1.0 / static_cast<double>(n - 1)) * 0.999;
      const double q = rng.uniform(0.05, 0.95);
      // Close to the upper end of the beta range r -> 1, i0 grows and (2 + beta)^i0
      // leaves double range; the budget is then reported as inapplicable.
      const auto g = solve_gamma(beta, n);
      std::size_t i0 = 0;
      while (std::pow(beta, static_cast<double>(m)) * g.C * std::pow(g.r, static_cast<double>(i0)) > q / 2.0) ++i0;
      if (!std::isfinite(std::pow(2.0 + beta, static_cast<double>(i0)))) {
        CHECK_THROWS_AS(gamma_for_quality(beta, n, m, q), InapplicableError);
        continue;
      }
      const auto b = gamma_for_quality(beta, n, m, q);
      CHECK(b.i0 == i0);
      CHECK(product_deviation_bound(beta, b.gamma, b.C, b.r, m, b.i0) <= q);
      CHECK(b.gamma <= b.gamma1);
      CHECK(b.gamma > 0.0);
      // Larger q never shrinks the budget; more factors never enlarge it.
      const auto budget_or_zero = [&](std::size_t mm, double qq) {
        try {
          return gamma_for_quality(beta, n, mm, qq).gamma;
        } catch (const InapplicableError&) {
          return 0.0;
        }
      };
      CHECK(budget_or_zero(m, std::min(0.99, q + 0.04)) >= b.gamma);
      CHECK(budget_or_zero(m + 2, q) <= b.gamma);
    }
    CHECK(gamma_for_quality(1.0, 2, 4, 0.5).gamma < gamma_for_quality(1.0, 2, 2, 0.5).gamma);
  }

  TEST_CASE("random parameters") {
    CHECK(random_params(1.0, 2, {0.5, 0.5}).freq == 0.5);
    CHECK(random_params(1.0, 1, {1.0}).freq == 1.0);
    CHECK(random_params(1.0, 2, {0.9, 0.1}).freq == doctest::Approx(0.18).epsilon(1e-14));
    const auto p = random_params(1.0, 2, {0.5, 0.5});
    CHECK(p.lambda == 0.25);
    CHECK(p.q == doctest::Approx(std::pow(0.99, 4.0)).epsilon(1e-14));
    CHECK(random_params(1.0, 1, {1.0}, 1.0).q == 0.99);
    CHECK(random_params(0.5, 2, {0.5, 0.5}).q == 0.999);
    CHECK(random_params(1.0, 2, {0.5, 0.5}, 0.001).q == doctest::Approx(std::pow(0.99, 1000.0)).epsilon(1e-12));
    CHECK_THROWS_AS(random_params(1.0, 2, {0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(random_params(1.0, 2, {1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(random_params(1.0, 2, {1.0}), ValidationError);
  }

  TEST_CASE("permutation frequency equals exhaustive enumeration") {
    gen::Rng rng(64);
    for (std::size_t n = 1; n <= 4; ++n) {
      for (int t = 0; t < 10; ++t) {
        std::vector<double> mu(n);
        double s = 0;
        for (double& x : mu) s += (x = rng.uniform(0.05, 1.0));
        for (double& x : mu) x /= s;
        double sum = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) sum += mu[i];
        mu.back() = 1.0 - sum;
        const auto p = random_params(1.0, n, mu);
        CHECK(p.freq == doctest::Approx(oracle::permutation_probability_by_enumeration(mu)).epsilon(1e-12));
        CHECK(p.freq > 0.0);
        CHECK(p.freq <= 1.0);
        if (n > 1) CHECK(p.freq < 1.0);
        // The contraction target is met exactly.
        const double factor = std::pow(1.0, n * (1 - p.lambda)) * std::pow(p.q, p.lambda);
        CHECK(factor <= 0.99 + 1e-12);
      }
    }
  }

  TEST_CASE("envelopes") {
    CHECK(cyclic_envelope(0.5, 0) == 1.0);
    CHECK(cyclic_envelope(0.5, 10) == doctest::Approx(9.7656e-4).epsilon(1e-4));
    CHECK(cyclic_envelope(0.9, 100) == doctest::Approx(2.656e-5).epsilon(1e-3));

    CHECK(quasi_periodic_envelope(1.3, 0.5, 4, 3) == doctest::Approx(std::pow(1.3, 3)));
    CHECK(quasi_periodic_envelope(1.0, 0.5, 3, 9) == 0.125);
    CHECK(quasi_periodic_envelope(1.05, 0.6, 4, 12) == doctest::Approx(std::pow(1.05, 3) * std::pow(0.6, 3)));
    CHECK(quasi_periodic_envelope(1.05, 0.6, 4, 12) == doctest::Approx(0.2501).epsilon(1e-3));

    // lambda = 1: the per-block factor is q.
    CHECK(random_envelope(1.7, 0.3, 2, 1.0, 1.0, 4) == doctest::Approx(1.7 * 0.3 * 0.3));
    CHECK(random_envelope(1.0, 0.25, 2, 0.5, 2.0, 8) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(random_envelope(1.2, 0.25, 3, 0.5, 2.0, 2) == doctest::Approx(2.0 * 1.44));
    CHECK_THROWS_AS(random_envelope(2.0, 0.9, 2, 0.5, 1.0, 4), InapplicableError);
  }

  TEST_CASE("envelopes are nonincreasing past their thresholds") {
    for (std::size_t i = 1; i < 200; ++i) {
      CHECK(cyclic_envelope(0.7, i) <= cyclic_envelope(0.7, i - 1));
      CHECK(quasi_periodic_envelope(1.1, 0.7, 4, i) <= quasi_periodic_envelope(1.1, 0.7, 4, i - 1));
      CHECK(random_envelope(1.01, 0.5, 3, 0.4, 1.5, i) <= random_envelope(1.01, 0.5, 3, 0.4, 1.5, i - 1));
    }
  }

  TEST_CASE("evaluate_criteria on families") {
    const auto lines = gen::two_lines(std::numbers::pi / 2);
    ProjectorFamily fam = lines;
    fam.set_consistency(check_weak_consistency(fam));
    CriteriaRequest req;
    req.m = 3;
    req.mu = {0.5, 0.5};
    const auto rep = evaluate_criteria(fam, req);
    CHECK(rep.all_pass());
    REQUIRE(rep.find("averaged"));
    CHECK(rep.find("averaged")->r_or_q.value() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.find("averaged")->C.value() == doctest::Approx(4.0).epsilon(1e-12));
    REQUIRE(rep.find("averaged_uniform"));
    REQUIRE(rep.find("quasi_periodic"));
    REQUIRE(rep.find("random"));

    std::ostringstream csv;
    write_criteria_csv(csv, rep);
    // cos(pi/2) rounds to 6e-17, so r and C sit within an ulp of 1/2 and 4.
    CHECK(csv.str().find("averaged,pass,0.5") != std::string::npos);
    const auto j = criteria_to_json(rep);
    CHECK(j["averaged"]["r"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(j["averaged"]["r_min"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("averaged passes while the uniform angle budget is exceeded") {
    // cos = 0.3 > gamma(1, 2) but r = 1/2 + 2.3 * 0.3 / 0.7 < 1.
    const auto lines = gen::two_lines(std::acos(0.3));
    CriteriaRequest req;
    req.names = {"averaged"};
    const auto rep = evaluate_criteria(lines, req);
    CHECK(rep.find("averaged")->pass == (0.5 + 2.3 * 0.3 / 0.7 < 1.0));
    CHECK_FALSE(rep.find("averaged_uniform")->pass);
  }

  TEST_CASE("beta out of range fails every row") {
    gen::Rng rng(65);
    const auto fam = gen::near_coordinate_family(rng, 4, 3, 0.01);
    CriteriaRequest req;
    req.beta = 1.6;
    req.m = 3;
    req.mu = {0.3, 0.3, 0.4};
    const auto rep = evaluate_criteria(fam, req);
    REQUIRE(rep.hypotheses.size() == 5);
    for (const auto& h : rep.hypotheses) {
      CHECK_FALSE(h.pass);
      CHECK(h.reason == "beta out of range");
    }
  }

  TEST_CASE("product criteria need weak consistency and configuration") {
    const auto lines = gen::two_lines(std::numbers::pi / 2);
    const auto rep = evaluate_criteria(lines, CriteriaRequest{});
    CHECK_FALSE(rep.find("cyclic")->pass);
    CHECK(rep.find("cyclic")->reason.find("consisten") != std::string::npos);
    ProjectorFamily fam = lines;
    fam.set_consistency(check_weak_consistency(fam));
    const auto rep2 = evaluate_criteria(fam, CriteriaRequest{});
    CHECK(rep2.find("cyclic")->pass);
    CHECK_FALSE(rep2.find("quasi_periodic")->pass);  // no window length
    CHECK_FALSE(rep2.find("random")->pass);          // no measure
    CriteriaRequest low;
    low.beta = 0.5;
    CHECK_THROWS_AS(evaluate_criteria(fam, low), ValidationError);
  }

  TEST_CASE("single projector passes trivially") {
    const NormedSpace sp(2);
    ProjectorFamily fam(sp, {make_orthogonal_projector(SubspaceBasis(2, {{1, 0}}), sp)});
    const auto rep = evaluate_criteria(fam, CriteriaRequest{});
    CHECK(rep.all_pass());
  }
}
