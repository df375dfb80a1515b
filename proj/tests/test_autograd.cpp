// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "cfdlab/autograd.hpp"
#include "cfdlab/error.hpp"
#include "gradcheck.hpp"

using namespace cfdlab;
using testing::random_matrix;

TEST_CASE("every op passes central finite differences", "[autograd][fd]") {
  std::mt19937_64 rng(2026);
  for (const auto& gc : testing::gradient_cases()) {
    DYNAMIC_SECTION(gc.name) {
      const testing::CaseReport rep = testing::run_case(gc, rng, 20);
      INFO("worst rel_error " << rep.worst << ", kink redraws " << rep.rejected);
      CHECK(rep.checked == 20);
      CHECK(rep.failures == 0);
    }
  }
}

TEST_CASE("kink detection flags a stencil across relu's corner", "[autograd][fd]") {
  Parameter x("x", Matrix{{3e-6, 0.5}});
  Parameter* ps[] = {&x};
  const auto r = testing::gradcheck(ps, [&](Tape& t) { return ag::sum(ag::relu(t.param(x))); });
  CHECK(r.kinks == 1);
  Parameter y("y", Matrix{{0.2, 0.5}});
  Parameter* qs[] = {&y};
  CHECK(testing::gradcheck(qs, [&](Tape& t) { return ag::sum(ag::relu(t.param(y))); }).kinks == 0);
}

TEST_CASE("tape misuse is reported", "[autograd]") {
  Parameter p("p", Matrix{{1.0, 2.0}});
  Tape tape;
  const Var y = ag::sum(tape.param(p));
  tape.backward(y);
  CHECK_THROWS_AS(tape.backward(y), TapeError);

  Tape t2;
  CHECK_THROWS_AS(t2.backward(t2.param(p)), TapeError);  // 1x2 root

  Tape t3;
  CHECK_THROWS_AS(ag::matmul(t3.param(p), t3.param(p)), ShapeError);
}

TEST_CASE("non-finite values raise NumericalError", "[autograd]") {
  Tape tape;
  CHECK_THROWS_AS(tape.constant(Matrix{{std::numeric_limits<double>::infinity()}}),
                  NumericalError);
  const Var big = tape.constant(Matrix{{1e308}});
  CHECK_THROWS_AS(ag::scale(big, 10.0), NumericalError);
}

TEST_CASE("gradients accumulate into parameters until zero_grad", "[autograd]") {
  Parameter p("p", Matrix{{3.0}});
  for (int i = 0; i < 2; ++i) {
    Tape tape;
    tape.backward(ag::scale(tape.param(p), 2.0));
  }
  CHECK(p.grad(0, 0) == 4.0);
  p.zero_grad();
  CHECK(p.grad(0, 0) == 0.0);
}

TEST_CASE("constants receive no gradient", "[autograd]") {
  Parameter p("p", Matrix{{1.0, -2.0}});
  Tape tape;
  const Var c = tape.constant(Matrix{{5.0, 7.0}});
  const Var loss = ag::sum(ag::add(tape.param(p), c));
  CHECK(tape.requires_grad(loss.id()));
  CHECK_FALSE(tape.requires_grad(c.id()));
  tape.backward(loss);
  CHECK(tape.grad(c) == Matrix(1, 2));
  CHECK(p.grad == Matrix{{1.0, 1.0}});
}

TEST_CASE("dropout: identity in eval, inverted scaling in train", "[autograd][dropout]") {
  std::mt19937_64 rng(5);
  Tape tape;
  const Var x = tape.constant(Matrix(200, 50, 1.0));
  CHECK(ag::dropout(x, 0.5, Mode::kEval, rng).id() == x.id());
  CHECK(ag::dropout(x, 0.0, Mode::kTrain, rng).id() == x.id());
  CHECK_THROWS_AS(ag::dropout(x, 1.0, Mode::kTrain, rng), ValueError);
  CHECK_THROWS_AS(ag::dropout(x, -0.1, Mode::kTrain, rng), ValueError);

  const Matrix& y = ag::dropout(x, 0.5, Mode::kTrain, rng).value();
  double total = 0;
  for (double v : y.data()) {
    CHECK((v == 0.0 || v == 2.0));
    total += v;
  }
  // 10000 Bernoulli(0.5) draws scaled by 2: mean 1, sd 0.01.
  CHECK(std::fabs(total / 10000.0 - 1.0) < 0.05);
}

TEST_CASE("cosine similarity is scale invariant", "[autograd][property]") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> scale(0.1, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_matrix(4, 6, rng), b = random_matrix(4, 6, rng);
    Matrix a2 = a, b2 = b;
    const double s1 = scale(rng), s2 = scale(rng);
    for (double& v : a2.data()) v *= s1;
    for (double& v : b2.data()) v *= s2;
    Tape t;
    const double c1 = ag::cosine_similarity(t.constant(a), t.constant(b)).value()(0, 0);
    const double c2 = ag::cosine_similarity(t.constant(a2), t.constant(b2)).value()(0, 0);
    CHECK(std::fabs(c1 - c2) < 1e-8);
    CHECK(std::fabs(c1) <= 1.0);
  }
  Tape t;
  const Matrix a = random_matrix(3, 5, rng);
  CHECK(ag::cosine_similarity(t.constant(a), t.constant(a)).value()(0, 0) ==
        Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("softmax rows lie on the simplex", "[autograd][property]") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    Tape t;
    const Matrix x = random_matrix(5, 7, rng, 30.0);
    const Matrix& y = ag::softmax_rows(t.constant(x)).value();
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double s = 0;
      for (double v : y.row(r)) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(std::fabs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("cross entropy matches a direct log-softmax", "[autograd]") {
  Tape t;
  const Matrix logits{{2.0, -1.0, 0.5}, {0.0, 0.0, 0.0}};
  const int labels[] = {0, 2};
  const double got = ag::cross_entropy(t.constant(logits), labels).value()(0, 0);
  const double l0 = -std::log(std::exp(2.0) / (std::exp(2.0) + std::exp(-1.0) + std::exp(0.5)));
  const double l1 = std::log(3.0);
  CHECK(got == Catch::Approx((l0 + l1) / 2).epsilon(1e-14));
  const int bad[] = {0, 3};
  CHECK_THROWS_AS(ag::cross_entropy(t.constant(logits), bad), ValueError);
}
