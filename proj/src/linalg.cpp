// SPDX-License-Identifier: Apache-2.0
#include "projlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "projlab/error.hpp"
#include "projlab/kernels.hpp"

namespace projlab {
namespace {

constexpr int kMaxSweeps = 100;

std::vector<std::size_t> descending_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& sym, double rel_tol) {
  if (!sym.square()) throw DimensionError("jacobi_eigen needs a square matrix");
  const std::size_t n = sym.rows();
  const auto& k = kernels::active();

  Matrix a = sym;
  Matrix vt = Matrix::identity(n);  // rows are eigenvectors
  const double scale = a.frobenius_norm();

  for (int sweep = 0; sweep < kMaxSweeps && scale > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= rel_tol * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        k.rotate(a.row(p).data(), a.row(q).data(), c, s, n);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        k.rotate(vt.row(p).data(), vt.row(q).data(), c, s, n);
      }
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  const auto order = descending_order(diag);
  SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = diag[order[c]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = vt(order[c], r);
  }
  return out;
}

Svd jacobi_svd(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const auto& k = kernels::active();
  constexpr double eps = std::numeric_limits<double>::epsilon();

  Matrix w = a.transpose();  // rows are the columns of a
  Matrix vt = Matrix::identity(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double* wi = w.row(i).data();
        double* wj = w.row(j).data();
        const double alpha = k.dot(wi, wi, m);
        const double beta = k.dot(wj, wj, m);
        const double gamma = k.dot(wi, wj, m);
        if (gamma == 0.0 || std::fabs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        k.rotate(wi, wj, c, s, m);
        k.rotate(vt.row(i).data(), vt.row(j).data(), c, s, n);
        rotated = true;
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* wi = w.row(i).data();
    sigma[i] = std::sqrt(k.dot(wi, wi, m));
  }
  const auto order = descending_order(sigma);

  Svd out{std::vector<double>(n), Matrix(m, n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.sigma[c] = sigma[src];
    const double inv = sigma[src] > 0.0 ? 1.0 / sigma[src] : 0.0;
    for (std::size_t r = 0; r < m; ++r) out.u(r, c) = w(src, r) * inv;
    for (std::size_t r = 0; r < n; ++r) out.v(r, c) = vt(src, r);
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  if (a.max_abs() == 0.0) return 0.0;
  const Matrix gram = a.transpose() * a;
  const auto eig = jacobi_eigen(gram);
  return std::sqrt(std::max(eig.values.front(), 0.0));
}

std::size_t numerical_rank(std::span<const double> sigma, double rel_tol) {
  if (sigma.empty()) return 0;
  const double top = *std::max_element(sigma.begin(), sigma.end());
  if (!(top > 0.0)) return 0;
  return static_cast<std::size_t>(
      std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > rel_tol * top; }));
}

Matrix orthonormal_columns(const Matrix& a, double rel_tol) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  const Svd svd = jacobi_svd(a);
  const std::size_t rank = numerical_rank(svd.sigma, rel_tol);
  return column_block(svd.u, 0, rank);
}

Matrix null_space(const Matrix& a, double rel_tol) {
  const std::size_t n = a.cols();
  if (a.rows() == 0 || a.max_abs() == 0.0) return Matrix::identity(n);
  const Svd svd = jacobi_svd(a);
  const std::size_t rank = numerical_rank(svd.sigma, rel_tol);
  return column_block(svd.v, rank, n - rank);
}

Matrix solve(const Matrix& a, const Matrix& b) {
  if (!a.square() || a.rows() != b.rows()) throw DimensionError("solve shape mismatch");
  const std::size_t n = a.rows();
  Matrix lu = a;
  Matrix x = b;
  const std::size_t rhs = b.cols();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(lu(r, col)) > std::fabs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == 0.0) throw Error("solve: singular matrix");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(col, j), lu(pivot, j));
      for (std::size_t j = 0; j < rhs; ++j) std::swap(x(col, j), x(pivot, j));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / lu(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) lu(r, j) -= f * lu(col, j);
      for (std::size_t j = 0; j < rhs; ++j) x(r, j) -= f * x(col, j);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t j = 0; j < rhs; ++j) {
      double s = x(col, j);
      for (std::size_t c = col + 1; c < n; ++c) s -= lu(col, c) * x(c, j);
      x(col, j) = s / lu(col, col);
    }
  }
  return x;
}

}  // namespace projlab
