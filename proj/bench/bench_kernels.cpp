// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

// Serial vs OpenMP GEMM on the shapes that dominate training: a batch of
// inputs through an encoder (batch x in_dim x dim) and its weight gradient.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cfdlab/kernels.hpp"

namespace {

using namespace cfdlab::kernels;

std::vector<double> filled(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

template <auto Kernel>
void gemm_forward(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto n = static_cast<std::size_t>(state.range(2));
  const auto a = filled(m * k, 1), b = filled(k * n, 2);
  std::vector<double> c(m * n);
  for (auto _ : state) {
    Kernel(m, n, k, a.data(), b.data(), c.data());
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * m * n * k));
}

template <auto Kernel>
void gemm_weight_grad(benchmark::State& state) {
  // dW(k,n) += X(m,k)^T * dY(m,n)
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto n = static_cast<std::size_t>(state.range(2));
  const auto x = filled(m * k, 3), dy = filled(m * n, 4);
  std::vector<double> dw(k * n);
  for (auto _ : state) {
    Kernel(k, n, m, x.data(), dy.data(), dw.data());
    benchmark::DoNotOptimize(dw.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * m * n * k));
}

void shapes(benchmark::internal::Benchmark* b) {
  b->Args({32, 512, 32})->Args({256, 512, 32})->Args({1024, 512, 224})->Args({256, 224, 224});
}

}  // namespace

BENCHMARK(gemm_forward<serial::gemm_nn>)->Apply(shapes);
BENCHMARK(gemm_forward<parallel::gemm_nn>)->Apply(shapes)->UseRealTime();
BENCHMARK(gemm_weight_grad<serial::gemm_tn_acc>)->Apply(shapes);
BENCHMARK(gemm_weight_grad<parallel::gemm_tn_acc>)->Apply(shapes)->UseRealTime();

BENCHMARK_MAIN();
