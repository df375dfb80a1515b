// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <bit>
#include <set>

#include "cfdlab/cfd.hpp"
#include "cfdlab/error.hpp"
#include "gradcheck.hpp"

using namespace cfdlab;
using testing::random_matrix;

TEST_CASE("subset lattice sizes", "[cfd][lattice]") {
  for (int m = 2; m <= 8; ++m) {
    const SubsetLattice lat = enumerate_subsets(m);
    CHECK(lat.final_count() == (std::size_t{1} << m) - 1);
    // Raw: F_j and P_j per modality, plus one G_S^j per member of each partial subset.
    std::size_t raw = 2 * static_cast<std::size_t>(m);
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      const int k = std::popcount(mask);
      if (k >= 2 && k < m) raw += static_cast<std::size_t>(k);
    }
    CHECK(lat.raw_count() == raw);
  }
  CHECK(enumerate_subsets(3).final_count() == 7);
  CHECK(enumerate_subsets(4).final_count() == 15);
  CHECK(enumerate_subsets(4).raw_count() == 32);
  CHECK(enumerate_subsets(2).partials.empty());
  CHECK_THROWS_AS(enumerate_subsets(1), ValueError);
  CHECK_THROWS_AS(enumerate_subsets(17), ValueError);
}

TEST_CASE("partial subsets are ordered by size then lexicographically", "[cfd][lattice]") {
  const SubsetLattice lat = enumerate_subsets(4);
  std::vector<std::string> labels;
  for (const Subset& s : lat.partials) labels.push_back(s.label(4));
  CHECK(labels == std::vector<std::string>{"12", "13", "14", "23", "24", "34", "123", "124",
                                           "134", "234"});
  CHECK(lat.feature_names().front() == "F");
  CHECK(lat.feature_names()[1] == "P_1");
  CHECK(lat.feature_names()[5] == "G_{12}");

  std::set<std::uint32_t> seen;
  for (const Subset& s : lat.feature_subsets()) seen.insert(s.mask());
  CHECK(seen.size() == 15);

  CHECK(Subset::of({0, 9}).label(10) == "1,10");
  CHECK(lat.without_partials().final_count() == 5);
}

TEST_CASE("decouple produces every raw and final feature", "[cfd]") {
  std::mt19937_64 rng(1);
  const SubsetLattice lat = enumerate_subsets(3);
  CfdEncoders enc(lat, 6, 4, rng);
  CHECK(enc.encoder_count() == 7);
  Tape tape;
  std::vector<Var> xs;
  for (int j = 0; j < 3; ++j) xs.push_back(tape.constant(random_matrix(5, 6, rng)));
  const DecoupledFeatureSet f = decouple(tape, xs, enc, lat);
  CHECK(f.raw_shared.size() == 3);
  CHECK(f.specific.size() == 3);
  CHECK(f.partial.size() == 3);
  CHECK(f.final_features().size() == 7);
  for (const auto& g : f.raw_partial) CHECK(g.size() == 2);
  CHECK(f.shared.rows() == 5);
  CHECK(f.shared.cols() == 4);

  // F is the mean of F_j; G_12 the mean of G_12^1 and G_12^2.
  for (std::size_t i = 0; i < 20; ++i) {
    const double expect = (f.raw_shared[0].value().data()[i] + f.raw_shared[1].value().data()[i] +
                           f.raw_shared[2].value().data()[i]) / 3.0;
    CHECK(f.shared.value().data()[i] == Catch::Approx(expect).epsilon(1e-14));
    const double g = (f.raw_partial[0][0].value().data()[i] + f.raw_partial[0][1].value().data()[i]) / 2.0;
    CHECK(f.partial[0].value().data()[i] == Catch::Approx(g).epsilon(1e-14));
  }

  xs.pop_back();
  CHECK_THROWS_AS(decouple(tape, xs, enc, lat), ShapeError);
}

TEST_CASE("batch permutation commutes with decoupling", "[cfd][property]") {
  std::mt19937_64 rng(2);
  const SubsetLattice lat = enumerate_subsets(3);
  CfdEncoders enc(lat, 5, 3, rng);
  std::vector<Matrix> inputs;
  for (int j = 0; j < 3; ++j) inputs.push_back(random_matrix(6, 5, rng));
  const std::size_t perm[] = {3, 0, 5, 1, 4, 2};

  Tape t1, t2;
  std::vector<Var> a, b;
  for (const Matrix& x : inputs) {
    a.push_back(t1.constant(x));
    b.push_back(t2.constant(x.gather_rows(perm)));
  }
  const auto fa = decouple(t1, a, enc, lat).final_features();
  const auto fb = decouple(t2, b, enc, lat).final_features();
  for (std::size_t k = 0; k < fa.size(); ++k) {
    CHECK(max_abs_diff(fa[k].value().gather_rows(perm), fb[k].value()) < 1e-14);
  }
}

TEST_CASE("disentanglement losses against direct formulas", "[cfd][loss]") {
  std::mt19937_64 rng(3);
  Tape tape;
  const Matrix a = random_matrix(3, 4, rng), b = random_matrix(3, 4, rng), c = random_matrix(3, 4, rng);
  auto mse = [](const Matrix& x, const Matrix& y) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x.data()[i] - y.data()[i]) * (x.data()[i] - y.data()[i]);
    return s / static_cast<double>(x.size());
  };
  auto cos_mean = [](const Matrix& x, const Matrix& y) {
    double s = 0;
    for (std::size_t r = 0; r < x.rows(); ++r) s += fn::cosine(x.row(r), y.row(r));
    return s / static_cast<double>(x.rows());
  };
  const Var va = tape.constant(a), vb = tape.constant(b), vc = tape.constant(c);
  const Var three[] = {va, vb, vc};
  CHECK(loss_shared(three).value()(0, 0) ==
        Catch::Approx(mse(a, b) + mse(a, c) + mse(b, c)).epsilon(1e-13));
  CHECK(loss_diff(three).value()(0, 0) ==
        Catch::Approx(cos_mean(a, b) + cos_mean(a, c) + cos_mean(b, c)).epsilon(1e-13));

  // Identical members give zero shared loss; orthogonal rows give zero diff loss.
  const Var same[] = {va, va};
  CHECK(loss_shared(same).value()(0, 0) == 0.0);
  const Var e1 = tape.constant(Matrix{{1, 0}}), e2 = tape.constant(Matrix{{0, 1}});
  const Var orth[] = {e1, e2};
  CHECK(loss_diff(orth).value()(0, 0) == 0.0);

  const Var one[] = {va};
  CHECK_THROWS_AS(loss_shared(one), ValueError);
  CHECK_THROWS_AS(loss_diff(one), ValueError);

  const SubsetLattice lat3 = enumerate_subsets(3);
  CHECK_THROWS_AS(loss_partial(tape, {{va, vb}}, lat3), ValueError);
  CHECK_THROWS_AS(loss_partial(tape, {{va}, {va, vb}, {vb, vc}}, lat3), ValueError);
  CHECK(loss_partial(tape, {{va, vb}, {va, vc}, {vb, vc}}, lat3).value()(0, 0) ==
        Catch::Approx(mse(a, b) + mse(a, c) + mse(b, c)).epsilon(1e-13));
  // M = 2 has no partial groups: the term is a constant zero.
  CHECK(loss_partial(tape, {}, enumerate_subsets(2)).value()(0, 0) == 0.0);
}
