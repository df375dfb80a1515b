// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cfdlab/error.hpp"
#include "cfdlab/metrics.hpp"

using namespace cfdlab;

namespace {

// Exhaustive pairwise comparison: P(score_pos > score_neg) + 0.5 P(tie).
double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

// Two-sided exact p by enumerating all 2^n sign patterns of the ranks.
double brute_force_wilcoxon(const std::vector<double>& ranks, double w_plus) {
  const std::size_t n = ranks.size();
  double lower = 0, upper = 0;
  const double total = std::ldexp(1.0, static_cast<int>(n));
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) w += ranks[i];
    if (w <= w_plus + 1e-9) lower += 1;
    if (w >= w_plus - 1e-9) upper += 1;
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

Matrix two_column(const std::vector<double>& p1) {
  Matrix m(p1.size(), 2);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    m(i, 0) = 1.0 - p1[i];
    m(i, 1) = p1[i];
  }
  return m;
}

}  // namespace

TEST_CASE("AUC equals the pairwise oracle exactly", "[metrics][auc]") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    std::vector<double> s(n);
    std::vector<int> y(n);
    const bool coarse = trial % 2 == 0;  // coarse scores force ties
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = coarse ? static_cast<double>(rng() % 5) / 4.0
                    : std::uniform_real_distribution<double>(0, 1)(rng);
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    CHECK(auc_roc(s, y) == pairwise_auc(s, y));
  }
  const std::vector<int> one_class{1, 1, 1};
  const std::vector<double> s3{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(auc_roc(s3, one_class), ValueError);
}

TEST_CASE("average precision on a fixed ranking", "[metrics][auprc]") {
  // Reference: scikit-learn 1.x average_precision_score / roc_auc_score.
  const std::vector<double> s{0.9, 0.8, 0.8, 0.7, 0.6, 0.55, 0.5, 0.4, 0.3, 0.2};
  const std::vector<int> y{1, 1, 0, 1, 0, 1, 0, 0, 1, 0};
  CHECK(auprc(s, y) == Catch::Approx(0.7277777777777779).epsilon(1e-14));
  CHECK(auc_roc(s, y) == Catch::Approx(0.7).epsilon(1e-14));
  // Perfect ranking.
  const std::vector<double> p{0.9, 0.8, 0.2, 0.1};
  const std::vector<int> py{1, 1, 0, 0};
  CHECK(auprc(p, py) == 1.0);
}

TEST_CASE("binary rates satisfy their closed forms", "[metrics][binary]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t tp = 1 + rng() % 50, fn = rng() % 50, tn = 1 + rng() % 50, fp = rng() % 50;
    const BinaryRates r = binary_rates(tp, fn, tn, fp);
    const double sen = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double spe = static_cast<double>(tn) / static_cast<double>(tn + fp);
    CHECK(std::fabs(r.sen - sen) <= 1e-12);
    CHECK(std::fabs(r.spe - spe) <= 1e-12);
    CHECK(std::fabs(r.acc - static_cast<double>(tp + tn) / static_cast<double>(tp + fn + tn + fp)) <= 1e-12);
    CHECK(std::fabs(r.g_mean - std::sqrt(sen * spe)) <= 1e-12);
    CHECK(std::fabs(r.ba_acc - 0.5 * (sen + spe)) <= 1e-12);
  }
  CHECK_THROWS_AS(binary_rates(0, 0, 5, 1), ValueError);

  const Matrix probs = two_column({0.9, 0.4, 0.6, 0.2});
  const std::vector<int> labels{1, 1, 0, 0};
  const BinaryRates r = binary_rates(probs, labels);
  CHECK(r.sen == 0.5);
  CHECK(r.spe == 0.5);
}

TEST_CASE("multiclass report", "[metrics][multiclass]") {
  const Matrix probs{{0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.2, 0.5, 0.3}, {0.1, 0.1, 0.8}, {0.6, 0.3, 0.1}};
  const std::vector<int> labels{0, 1, 2, 2, 1};
  const MulticlassReport r = multiclass_report(probs, labels);
  CHECK(r.acc == Catch::Approx(3.0 / 5.0));
  CHECK(r.per_class_acc == std::vector<double>{1.0, 0.5, 0.5});
  // Per-class F1: c0 p=1/2 r=1 -> 2/3; c1 p=1/2 r=1/2 -> 1/2; c2 p=1 r=1/2 -> 2/3.
  CHECK(r.macro_f1 == Catch::Approx((2.0 / 3 + 0.5 + 2.0 / 3) / 3));
  CHECK(r.weighted_f1 == Catch::Approx((1 * 2.0 / 3 + 2 * 0.5 + 2 * 2.0 / 3) / 5));
  CHECK_FALSE(r.empty_class);

  const MetricsReport rep = evaluate_predictions(probs, labels);
  CHECK(rep.task == MetricsReport::Task::kMulticlass);
  CHECK(rep.get("ACC_class_2") == 0.5);
  CHECK_THROWS_AS(rep.get("SEN"), ValueError);

  Matrix bad = probs;
  bad(0, 0) = 0.9;
  CHECK_THROWS_AS(multiclass_report(bad, labels), ValueError);
}

TEST_CASE("metrics report JSON and CSV round-trip", "[metrics][io]") {
  const Matrix probs = two_column({0.9, 0.3, 0.65, 0.2, 0.55, 0.1});
  const std::vector<int> labels{1, 0, 1, 0, 0, 1};
  const MetricsReport rep = evaluate_predictions(probs, labels);
  CHECK(rep.csv_header() ==
        std::vector<std::string>{"n", "SEN", "SPE", "ACC", "G_mean", "Ba_ACC", "AUPRC", "AUC"});
  const MetricsReport back = MetricsReport::from_json(rep.to_json());
  CHECK(back.values == rep.values);
  CHECK(back.n == 6);

  const MetricsReport reps[] = {rep, rep};
  const auto summary = summarize(reps);
  CHECK(summary.size() == rep.values.size());
  CHECK(summary[0].std == 0.0);
  CHECK(summary[0].mean == rep.values[0].second);
}

TEST_CASE("Wilcoxon exact p equals sign enumeration", "[metrics][wilcoxon]") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng() % 8;  // 5..12
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Quarter steps make tied |differences| common.
      a[i] = static_cast<double>(rng() % 9) * 0.25;
      b[i] = static_cast<double>(rng() % 9) * 0.25;
      if (a[i] == b[i]) a[i] += 0.5;
    }
    const WilcoxonResult r = wilcoxon_signed_rank(a, b, WilcoxonMethod::kExact);
    REQUIRE(r.exact);

    // Independent ranking for the oracle.
    std::vector<double> absd(n);
    for (std::size_t i = 0; i < n; ++i) absd[i] = std::fabs(a[i] - b[i]);
    std::vector<double> ranks(n);
    double w_plus = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double below = 0, equal = 0;
      for (std::size_t j = 0; j < n; ++j) {
        below += absd[j] < absd[i];
        equal += absd[j] == absd[i];
      }
      ranks[i] = below + (equal + 1) / 2.0;
      if (a[i] > b[i]) w_plus += ranks[i];
    }
    CHECK(r.w_plus == w_plus);
    CHECK(r.p_value == Catch::Approx(brute_force_wilcoxon(ranks, w_plus)).epsilon(1e-12));
  }
}

TEST_CASE("Wilcoxon normal approximation matches a reference", "[metrics][wilcoxon]") {
  // Reference: scipy.stats.wilcoxon(a, b, correction=True, method="approx").
  const std::vector<double> a{0.81, 0.77, 0.92, 0.65, 0.70, 0.88, 0.79, 0.83,
                              0.90, 0.74, 0.86, 0.69, 0.80, 0.95, 0.72};
  const std::vector<double> b{0.78, 0.75, 0.85, 0.66, 0.61, 0.80, 0.79, 0.76,
                              0.84, 0.70, 0.80, 0.60, 0.71, 0.90, 0.73};
  const WilcoxonResult r = wilcoxon_signed_rank(a, b);
  CHECK_FALSE(r.exact);
  CHECK(r.n == 14);
  CHECK(r.statistic == 3.0);
  CHECK(r.p_value == Catch::Approx(0.002086999932219504).epsilon(1e-9));

  const std::vector<double> a2{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  const std::vector<double> b2{0, 2.5, 1, 4.5, 3, 7, 5, 9, 8, 8, 10, 13, 12, 15, 13, 18};
  const WilcoxonResult r2 = wilcoxon_signed_rank(a2, b2);
  CHECK(r2.statistic == 42.5);
  CHECK(r2.p_value == Catch::Approx(0.18701887078759494).epsilon(1e-9));
}

TEST_CASE("Wilcoxon input errors", "[metrics][wilcoxon]") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> shorter{1, 2, 3, 4};
  CHECK_THROWS_AS(wilcoxon_signed_rank(x, shorter), ValueError);
  CHECK_THROWS_AS(wilcoxon_signed_rank(x, x), ValueError);
  const std::vector<double> y{1, 2, 3, 5, 6};  // only two non-zero differences
  CHECK_THROWS_AS(wilcoxon_signed_rank(x, y), ValueError);
}
