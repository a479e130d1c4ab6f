// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "projlab/error.hpp"
#include "projlab/normed_space.hpp"

using namespace projlab;

namespace {

double weighted_norm(const std::vector<double>& v, double p, const std::vector<double>& w) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, w[i] * std::fabs(v[i]));
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::fabs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

// Dense sampling of sup |Av|/|v| over directions in R^2, weighted norm.
double sampled_norm_2d(const Matrix& a, double p, const std::vector<double>& w, std::size_t samples) {
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(samples);
    const std::vector<double> v{std::cos(t), std::sin(t)};
    const std::vector<double> av{a(0, 0) * v[0] + a(0, 1) * v[1], a(1, 0) * v[0] + a(1, 1) * v[1]};
    best = std::max(best, weighted_norm(av, p, w) / weighted_norm(v, p, w));
  }
  return best;
}

}  // namespace

TEST_SUITE("normed_space") {
  TEST_CASE("space validation names the field") {
    CHECK_THROWS_AS(NormedSpace(0), ValidationError);
    CHECK_THROWS_AS(NormedSpace(2, 0.5), ValidationError);
    CHECK_THROWS_AS(NormedSpace(2, 2.0, {1.0}), ValidationError);
    CHECK_THROWS_AS(NormedSpace(2, 2.0, {1.0, 0.0}), ValidationError);
    try {
      NormedSpace(2, 2.0, {1.0, -1.0});
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "space.weights");
    }
    CHECK(NormedSpace(3).hilbert());
    CHECK_FALSE(NormedSpace(3, 2.0, {1, 2, 1}).hilbert());
    CHECK(NormedSpace(3, kInfinity).closed_form_norm());
  }

  TEST_CASE("vector norms") {
    CHECK(vector_norm(std::vector<double>{1, 0}, NormedSpace(2)) == 1.0);
    CHECK(vector_norm(std::vector<double>{3, -4}, NormedSpace(2)) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(vector_norm(std::vector<double>{1, -2, 3}, NormedSpace(3, 1.0)) == 6.0);
    CHECK(vector_norm(std::vector<double>{1, -2, 3}, NormedSpace(3, kInfinity)) == 3.0);
    CHECK(vector_norm(std::vector<double>{1, -2}, NormedSpace(2, kInfinity, {4, 1})) == 4.0);
    CHECK(vector_norm(std::vector<double>{1, 1}, NormedSpace(2, 3.0, {2, 6})) ==
          doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(vector_norm(std::vector<double>{1, 2, 3}, NormedSpace(2)), DimensionError);
    // No overflow for huge entries.
    CHECK(vector_norm(std::vector<double>{3e200, 4e200}, NormedSpace(2)) == doctest::Approx(5e200));
  }

  TEST_CASE("norm axioms at sampled points") {
    gen::Rng rng(21);
    const std::vector<NormedSpace> spaces{NormedSpace(3),           NormedSpace(3, 1.0),
                                          NormedSpace(3, kInfinity), NormedSpace(3, 3.0),
                                          NormedSpace(3, 1.5, {0.5, 2, 3}), NormedSpace(3, kInfinity, {1, 2, 0.1})};
    for (const auto& sp : spaces) {
      for (int t = 0; t < 1000; ++t) {
        const auto u = gen::random_vector(rng, 3), v = gen::random_vector(rng, 3);
        std::vector<double> sum(3), scaled(3);
        const double c = rng.normal();
        for (int i = 0; i < 3; ++i) {
          sum[i] = u[i] + v[i];
          scaled[i] = c * u[i];
        }
        const double nu = vector_norm(u, sp), nv = vector_norm(v, sp);
        CHECK(vector_norm(sum, sp) <= nu + nv + 1e-10);
        CHECK(std::fabs(vector_norm(scaled, sp) - std::fabs(c) * nu) <= 1e-10 * (1 + nu));
      }
    }
  }

  TEST_CASE("exact operator norms from closed forms") {
    CHECK(operator_norm(Matrix::identity(3), NormedSpace(3, 3.0)).exact);
    CHECK(operator_norm(Matrix::identity(3), NormedSpace(3, 3.0)).upper == doctest::Approx(1.0));
    for (double p : {1.0, 2.0, kInfinity}) {
      const auto c = operator_norm(Matrix::identity(4), NormedSpace(4, p, {1, 2, 3, 4}));
      CHECK(c.exact);
      CHECK(c.upper == doctest::Approx(1.0).epsilon(1e-14));
    }

    const Matrix a{{1, -2}, {3, 4}};
    const auto c1 = operator_norm(a, NormedSpace(2, 1.0));
    CHECK(c1.exact);
    CHECK(c1.upper == 6.0);
    // Sampling the l1 sphere confirms the maximum column sum.
    CHECK(oracle::sphere_sample_norm_2d({{1, -2}, {3, 4}}, 1.0, 40000) == doctest::Approx(6.0).epsilon(1e-9));

    const Matrix b{{1, 1}, {0, 0}};
    const auto c2 = operator_norm(b, NormedSpace(2));
    CHECK(c2.exact);
    CHECK(c2.upper == doctest::Approx(oracle::spectral_norm_2x2(1, 1, 0, 0)).epsilon(1e-14));
    CHECK(c2.upper == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    const auto ci = operator_norm(a, NormedSpace(2, kInfinity));
    CHECK(ci.upper == 7.0);
  }

  TEST_CASE("weighted closed-form norms agree with dense sampling") {
    gen::Rng rng(22);
    for (double p : {1.0, 2.0, kInfinity}) {
      for (int t = 0; t < 20; ++t) {
        const Matrix a = gen::random_matrix(rng, 2, 2);
        const std::vector<double> w{rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)};
        const auto c = operator_norm(a, NormedSpace(2, p, w));
        CHECK(c.exact);
        const double sampled = sampled_norm_2d(a, p, w, 20000);
        CHECK(sampled <= c.upper * (1 + 1e-12));
        CHECK(sampled >= c.upper * (1 - 1e-3));
      }
    }
  }

  TEST_CASE("ascent examples") {
    const auto zero = estimate_norm_ascent(Operator(Matrix(3, 3), NormedSpace(3, 3.0)), 4, 0);
    CHECK(zero.lower == 0.0);
    CHECK(zero.upper == 0.0);

    const auto three = estimate_norm_ascent(Operator(Matrix::identity(3) * 3.0, NormedSpace(3, 3.0)), 4, 7);
    CHECK(three.lower == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(three.upper == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(three.exact);

    const Matrix a{{1, 1}, {0, 1}};
    const auto c = estimate_norm_ascent(Operator(a, NormedSpace(2, 3.0)), 32, 1);
    CHECK(c.lower >= 1.0);
    CHECK(c.lower <= 2.0);
    CHECK(c.upper == doctest::Approx(std::pow(2.0, 1.0 / 3.0) * std::pow(2.0, 2.0 / 3.0)));
    CHECK(c.lower <= c.upper);
    // Oracle: 10^4 directions on the unit sphere.
    const double sampled = oracle::sphere_sample_norm_2d({{1, 1}, {0, 1}}, 3.0, 10000);
    CHECK(c.lower >= sampled * (1 - 1e-6));
    CHECK(c.lower <= sampled * (1 + 1e-3));
  }

  TEST_CASE("ascent is deterministic and monotone in the number of starts") {
    gen::Rng rng(23);
    for (int t = 0; t < 10; ++t) {
      const Matrix a = gen::random_matrix(rng, 3, 3);
      const NormedSpace sp(3, 1.7, {1, 0.5, 2});
      const Operator op(a, sp);
      const auto x = estimate_norm_ascent(op, 8, 5);
      const auto y = estimate_norm_ascent(op, 8, 5);
      CHECK(x.lower == y.lower);
      double prev = 0.0;
      for (std::size_t s : {1u, 2u, 4u, 8u, 16u}) {
        const double l = estimate_norm_ascent(op, s, 5).lower;
        CHECK(l >= prev);
        prev = l;
      }
    }
  }

  TEST_CASE("certificate soundness against sampling for general p") {
    gen::Rng rng(24);
    for (double p : {1.3, 3.0, 6.0}) {
      for (int t = 0; t < 15; ++t) {
        const Matrix a = gen::random_matrix(rng, 2, 2);
        const std::vector<double> w{rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0)};
        const auto c = operator_norm(a, NormedSpace(2, p, w));
        const double sampled = sampled_norm_2d(a, p, w, 20000);
        CHECK(c.lower <= c.upper);
        CHECK(sampled <= c.upper * (1 + 1e-12));
        // Sampling resolution: the true maximum exceeds the best sample by at
        // most a small relative amount; the ascent must land within it.
        CHECK(c.lower >= sampled * (1 - 1e-6));
        CHECK(c.lower <= sampled * (1 + 1e-3));
      }
    }
  }

  TEST_CASE("submultiplicativity and duality") {
    gen::Rng rng(25);
    for (double p : {1.0, 2.0, kInfinity, 3.0}) {
      const NormedSpace sp(4, p);
      for (int t = 0; t < 50; ++t) {
        const Matrix a = gen::random_matrix(rng, 4, 4), b = gen::random_matrix(rng, 4, 4);
        CHECK(operator_norm_upper(a * b, sp) <= operator_norm_upper(a, sp) * operator_norm_upper(b, sp) + 1e-9);
      }
    }
    for (int t = 0; t < 50; ++t) {
      const Matrix a = gen::random_matrix(rng, 4, 4);
      CHECK(operator_norm(a, NormedSpace(4, 1.0)).upper ==
            doctest::Approx(operator_norm(a.transpose(), NormedSpace(4, kInfinity)).upper).epsilon(1e-15));
    }
  }

  TEST_CASE("spectral norm agrees with power iteration") {
    gen::Rng rng(26);
    for (int t = 0; t < 30; ++t) {
      const std::size_t d = rng.index(2, 6);
      const Matrix a = gen::random_matrix(rng, d, d);
      CHECK(operator_norm(a, NormedSpace(d)).upper ==
            doctest::Approx(oracle::spectral_norm(gen::to_dense(a))).epsilon(1e-9));
    }
  }

  TEST_CASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(Operator(Matrix(2, 3), NormedSpace(2)), DimensionError);
    CHECK_THROWS_AS(operator_norm(Matrix::identity(3), NormedSpace(2)), DimensionError);
  }
}
