// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <omp.h>

#include <random>

#include "cfdlab/error.hpp"
#include "cfdlab/kernels.hpp"
#include "cfdlab/matrix.hpp"
#include "gradcheck.hpp"

using namespace cfdlab;
using testing::random_matrix;

namespace {

// Textbook triple loop, the oracle for all three kernels.
Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
      c(i, j) = s;
    }
  return c;
}

}  // namespace

TEST_CASE("matrix construction and access", "[matrix]") {
  Matrix m{{1, 2, 3}, {4, 5, 6}};
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6);
  CHECK(m.transposed()(2, 1) == 6);
  CHECK(m.shape_str() == "2x3");
  CHECK(Matrix::identity(3)(1, 1) == 1);
  CHECK(Matrix::identity(3)(0, 1) == 0);
  CHECK_THROWS_AS((Matrix(2, 2, std::vector<double>{1, 2, 3})), ShapeError);
  CHECK_THROWS_AS((Matrix{{1, 2}, {3}}), ShapeError);

  const std::size_t rows[] = {1, 1, 0};
  const Matrix g = m.gather_rows(rows);
  CHECK(g == Matrix{{4, 5, 6}, {4, 5, 6}, {1, 2, 3}});

  Matrix nan{{1, std::numeric_limits<double>::quiet_NaN()}};
  CHECK_FALSE(nan.all_finite());
  CHECK(m.all_finite());
}

TEST_CASE("equality is bitwise", "[matrix]") {
  Matrix a{{0.0}};
  Matrix b{{-0.0}};
  CHECK_FALSE(a == b);
  CHECK(max_abs_diff(a, b) == 0.0);
}

TEST_CASE("serial kernels match the naive product", "[kernels]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 1 + rng() % 9, n = 1 + rng() % 9, k = 1 + rng() % 9;
    const Matrix a = random_matrix(m, k, rng);
    const Matrix b = random_matrix(k, n, rng);
    const Matrix ref = naive_product(a, b);

    Matrix c(m, n);
    kernels::serial::gemm_nn(m, n, k, a.data().data(), b.data().data(), c.data().data());
    CHECK(max_abs_diff(c, ref) < 1e-12);

    // C += A^T B with A stored k x m.
    const Matrix at = a.transposed();
    Matrix c2(m, n, 1.0);
    kernels::serial::gemm_tn_acc(m, n, k, at.data().data(), b.data().data(), c2.data().data());
    for (double& v : c2.data()) v -= 1.0;
    CHECK(max_abs_diff(c2, ref) < 1e-12);

    // C += A B^T with B stored n x k.
    const Matrix bt = b.transposed();
    Matrix c3(m, n);
    kernels::serial::gemm_nt_acc(m, n, k, a.data().data(), bt.data().data(), c3.data().data());
    CHECK(max_abs_diff(c3, ref) < 1e-12);
  }
}

TEST_CASE("parallel kernels are bitwise equal to the serial reference", "[kernels][parallel]") {
  std::mt19937_64 rng(12);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);  // oversubscribe even on one core so the split is exercised
  // Small shapes stay serial, large ones cross kParallelWorkThreshold.
  const std::size_t shapes[][3] = {{3, 4, 5}, {64, 48, 40}, {200, 33, 17}, {97, 129, 64}};
  for (const auto& s : shapes) {
    const std::size_t m = s[0], n = s[1], k = s[2];
    const Matrix a = random_matrix(m, k, rng), b = random_matrix(k, n, rng);
    const Matrix at = random_matrix(k, m, rng), bt = random_matrix(n, k, rng);
    Matrix s1(m, n), p1(m, n);
    kernels::serial::gemm_nn(m, n, k, a.data().data(), b.data().data(), s1.data().data());
    kernels::parallel::gemm_nn(m, n, k, a.data().data(), b.data().data(), p1.data().data());
    CHECK(s1 == p1);

    Matrix s2 = random_matrix(m, n, rng), p2 = s2;
    kernels::serial::gemm_tn_acc(m, n, k, at.data().data(), b.data().data(), s2.data().data());
    kernels::parallel::gemm_tn_acc(m, n, k, at.data().data(), b.data().data(), p2.data().data());
    CHECK(s2 == p2);

    Matrix s3 = random_matrix(m, n, rng), p3 = s3;
    kernels::serial::gemm_nt_acc(m, n, k, a.data().data(), bt.data().data(), s3.data().data());
    kernels::parallel::gemm_nt_acc(m, n, k, a.data().data(), bt.data().data(), p3.data().data());
    CHECK(s3 == p3);
  }
  omp_set_num_threads(saved);
}
