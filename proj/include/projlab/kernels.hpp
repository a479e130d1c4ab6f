// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

// Dense double-precision inner loops. Every routine has a scalar reference
// implementation; an AVX2+FMA variant is selected at runtime when the CPU
// supports it. Variants agree to rounding (FMA contracts differently), not
// bit-for-bit, so a single process always uses one table.
namespace projlab::kernels {

struct Table {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // acc[i] += |x[i]|
  void (*abs_accumulate)(const double* x, double* acc, std::size_t n);
  double (*abs_sum)(const double* x, std::size_t n);
  double (*abs_max)(const double* x, std::size_t n);
  // (x, y) <- (c*x - s*y, s*x + c*y), the plane rotation used by Jacobi sweeps
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
  // c = a * b for row-major a (m x k), b (k x n), c (m x n)
  void (*gemm)(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);
};

const Table& scalar();

// nullptr when the build has no AVX2 translation unit or the CPU lacks AVX2/FMA.
const Table* avx2();

// Table used by the library. Setting PROJLAB_KERNELS=scalar in the
// environment pins the scalar reference.
const Table& active();

}  // namespace projlab::kernels
