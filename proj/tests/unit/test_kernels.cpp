// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "generators.hpp"
#include "projlab/kernels.hpp"

namespace k = projlab::kernels;

namespace {

std::vector<const k::Table*> variants() {
  std::vector<const k::Table*> v{&k::scalar()};
  if (k::avx2()) v.push_back(k::avx2());
  return v;
}

std::vector<double> sample(gen::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar table matches naive loops") {
    gen::Rng rng(11);
    const auto& s = k::scalar();
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u}) {
      const auto a = sample(rng, n), b = sample(rng, n);
      double dot = 0.0, sum = 0.0, mx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        sum += std::fabs(a[i]);
        mx = std::max(mx, std::fabs(a[i]));
      }
      CHECK(s.dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(1e-14));
      CHECK(s.abs_sum(a.data(), n) == doctest::Approx(sum).epsilon(1e-14));
      CHECK(s.abs_max(a.data(), n) == mx);
    }
  }

  TEST_CASE("every variant agrees with the scalar reference") {
    gen::Rng rng(12);
    const auto& ref = k::scalar();
    for (const k::Table* t : variants()) {
      CAPTURE(t->name);
      for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 9u, 15u, 31u, 64u, 100u}) {
        CAPTURE(n);
        const auto a = sample(rng, n), b = sample(rng, n);
        CHECK(t->dot(a.data(), b.data(), n) ==
              doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(1e-13).scale(1.0));
        CHECK(t->abs_sum(a.data(), n) == doctest::Approx(ref.abs_sum(a.data(), n)).epsilon(1e-13));
        CHECK(t->abs_max(a.data(), n) == ref.abs_max(a.data(), n));

        auto y1 = b, y2 = b;
        ref.axpy(0.37, a.data(), y1.data(), n);
        t->axpy(0.37, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-14).scale(1.0));

        std::vector<double> acc1(n, 1.0), acc2(n, 1.0);
        ref.abs_accumulate(a.data(), acc1.data(), n);
        t->abs_accumulate(a.data(), acc2.data(), n);
        CHECK(acc1 == acc2);

        auto x1 = a, z1 = b, x2 = a, z2 = b;
        ref.rotate(x1.data(), z1.data(), 0.6, 0.8, n);
        t->rotate(x2.data(), z2.data(), 0.6, 0.8, n);
        for (std::size_t i = 0; i < n; ++i) {
          CHECK(x2[i] == doctest::Approx(x1[i]).epsilon(1e-14).scale(1.0));
          CHECK(z2[i] == doctest::Approx(z1[i]).epsilon(1e-14).scale(1.0));
        }
      }
    }
  }

  TEST_CASE("gemm variants match the triple loop") {
    gen::Rng rng(13);
    for (const k::Table* t : variants()) {
      CAPTURE(t->name);
      for (auto [m, kk, n] : std::vector<std::array<std::size_t, 3>>{
               {1, 1, 1}, {2, 3, 4}, {5, 5, 5}, {7, 9, 3}, {8, 8, 8}, {13, 6, 11}, {4, 0, 4}}) {
        const auto a = sample(rng, m * kk), b = sample(rng, kk * n);
        std::vector<double> c(m * n, 99.0);
        t->gemm(a.data(), b.data(), c.data(), m, kk, n);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double ref = 0.0;
            for (std::size_t l = 0; l < kk; ++l) ref += a[i * kk + l] * b[l * n + j];
            CHECK(c[i * n + j] == doctest::Approx(ref).epsilon(1e-13).scale(1.0));
          }
      }
    }
  }

  TEST_CASE("rotation preserves the Euclidean norm of the pair") {
    gen::Rng rng(14);
    for (const k::Table* t : variants()) {
      auto x = sample(rng, 17), y = sample(rng, 17);
      double before = 0.0, after = 0.0;
      for (std::size_t i = 0; i < 17; ++i) before += x[i] * x[i] + y[i] * y[i];
      const double th = 0.3;
      t->rotate(x.data(), y.data(), std::cos(th), std::sin(th), 17);
      for (std::size_t i = 0; i < 17; ++i) after += x[i] * x[i] + y[i] * y[i];
      CHECK(after == doctest::Approx(before).epsilon(1e-14));
    }
  }

  TEST_CASE("active table is one of the variants") {
    const auto& a = k::active();
    bool known = &a == &k::scalar() || (k::avx2() && &a == k::avx2());
    CHECK(known);
  }
}
