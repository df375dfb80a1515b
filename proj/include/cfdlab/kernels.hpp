// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace cfdlab::kernels {

// Raw row-major GEMM kernels behind the autodiff ops. Shapes are given as
// C(m,n), A's inner dimension k. All pointers refer to dense row-major blocks.
//
// Both variants run the same loop nest per output row, so for a fixed input
// they produce bitwise-identical results regardless of the thread count.

namespace serial {

/// C = A(m,k) * B(k,n)
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c);
/// C += A(k,m)^T * B(k,n)
void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c);
/// C += A(m,k) * B(n,k)^T
void gemm_nt_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c);

}  // namespace serial

namespace parallel {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c);
void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c);
void gemm_nt_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c);

}  // namespace parallel

/// Below this many multiply-adds the parallel kernels stay on one thread.
inline constexpr std::size_t kParallelWorkThreshold = 1u << 16;

}  // namespace cfdlab::kernels
