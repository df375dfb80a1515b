// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/kernels.hpp"

#include <algorithm>
#include <cstdint>

namespace cfdlab::kernels {

namespace {

// One output row of C = A*B. i-k-j order keeps the B and C accesses unit-stride.
inline void nn_row(std::size_t i, std::size_t n, std::size_t k, const double* a, const double* b,
                   double* c) {
  double* ci = c + i * n;
  std::fill(ci, ci + n, 0.0);
  const double* ai = a + i * k;
  for (std::size_t p = 0; p < k; ++p) {
    const double aip = ai[p];
    const double* bp = b + p * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
  }
}

// One output row of C += A^T*B, where row i of C gathers column i of A.
inline void tn_row(std::size_t i, std::size_t m, std::size_t n, std::size_t k, const double* a,
                   const double* b, double* c) {
  double* ci = c + i * n;
  for (std::size_t p = 0; p < k; ++p) {
    const double api = a[p * m + i];
    if (api == 0.0) continue;
    const double* bp = b + p * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
  }
}

// One output row of C += A*B^T: dot products of A's row i with every row of B.
inline void nt_row(std::size_t i, std::size_t n, std::size_t k, const double* a, const double* b,
                   double* c) {
  double* ci = c + i * n;
  const double* ai = a + i * k;
  for (std::size_t j = 0; j < n; ++j) {
    const double* bj = b + j * k;
    double s = 0.0;
    for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
    ci[j] += s;
  }
}

}  // namespace

namespace serial {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c) {
  for (std::size_t i = 0; i < m; ++i) nn_row(i, n, k, a, b, c);
}

void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c) {
  for (std::size_t i = 0; i < m; ++i) tn_row(i, m, n, k, a, b, c);
}

void gemm_nt_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c) {
  for (std::size_t i = 0; i < m; ++i) nt_row(i, n, k, a, b, c);
}

}  // namespace serial

namespace parallel {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c) {
  const auto rows = static_cast<std::int64_t>(m);
  const bool big = m * n * k >= kParallelWorkThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t i = 0; i < rows; ++i) nn_row(static_cast<std::size_t>(i), n, k, a, b, c);
}

void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c) {
  const auto rows = static_cast<std::int64_t>(m);
  const bool big = m * n * k >= kParallelWorkThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t i = 0; i < rows; ++i) tn_row(static_cast<std::size_t>(i), m, n, k, a, b, c);
}

void gemm_nt_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c) {
  const auto rows = static_cast<std::int64_t>(m);
  const bool big = m * n * k >= kParallelWorkThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t i = 0; i < rows; ++i) nt_row(static_cast<std::size_t>(i), n, k, a, b, c);
}

}  // namespace parallel

}  // namespace cfdlab::kernels
