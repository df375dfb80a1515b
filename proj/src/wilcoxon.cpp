// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfdlab/error.hpp"
#include "cfdlab/metrics.hpp"

namespace cfdlab {

namespace {

// Two-sided p from the exact null distribution of W+. Ranks are doubled so
// that tie-averaged (half-integer) ranks become integers, then the number
// of sign assignments reaching each doubled sum is counted by DP.
double exact_p(const std::vector<double>& ranks, double w_plus) {
  std::vector<long> doubled;
  long total = 0;
  for (double r : ranks) {
    doubled.push_back(std::lround(2.0 * r));
    total += doubled.back();
  }
  std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
  ways[0] = 1.0;
  long reach = 0;
  for (long r : doubled) {
    for (long s = reach; s >= 0; --s)
      ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
    reach += r;
  }
  const long w2 = std::lround(2.0 * w_plus);
  double lower = 0.0, upper = 0.0, all = 0.0;
  for (long s = 0; s <= total; ++s) {
    const double c = ways[static_cast<std::size_t>(s)];
    all += c;
    if (s <= w2) lower += c;
    if (s >= w2) upper += c;
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMethod method) {
  if (a.size() != b.size()) throw ValueError("wilcoxon: samples differ in length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw ValueError("wilcoxon: degenerate pairs (all differences are zero)");
  if (diffs.size() < 5) {
    throw ValueError("wilcoxon: need at least 5 non-zero differences, got " +
                     std::to_string(diffs.size()));
  }

  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(diffs[i]) < std::abs(diffs[j]);
  });
  std::vector<double> ranks(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
    const auto t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  WilcoxonResult res;
  res.n = n;
  for (std::size_t i = 0; i < n; ++i) (diffs[i] > 0 ? res.w_plus : res.w_minus) += ranks[i];
  res.statistic = std::min(res.w_plus, res.w_minus);

  const bool exact = method == WilcoxonMethod::kExact ||
                     (method == WilcoxonMethod::kAuto && n <= kWilcoxonExactMaxN);
  res.exact = exact;
  if (exact) {
    res.p_value = exact_p(ranks, res.w_plus);
  } else {
    const auto nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double dev = std::max(0.0, std::abs(res.w_plus - mean) - 0.5);
    res.p_value = var > 0.0 ? std::min(1.0, std::erfc(dev / std::sqrt(var) / std::sqrt(2.0))) : 1.0;
  }
  return res;
}

}  // namespace cfdlab
