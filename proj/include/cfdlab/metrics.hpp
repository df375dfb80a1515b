// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfdlab/matrix.hpp"

namespace cfdlab {

/// counts(t, p): samples of true class t predicted as p.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_cls) : k_(num_cls), counts_(num_cls * num_cls, 0) {}
  static ConfusionMatrix from(std::span<const int> predicted, std::span<const int> truth,
                              std::size_t num_cls);

  void add(int truth, int predicted);
  [[nodiscard]] std::size_t operator()(std::size_t t, std::size_t p) const {
    return counts_[t * k_ + p];
  }
  [[nodiscard]] std::size_t num_cls() const noexcept { return k_; }
  [[nodiscard]] std::size_t total() const;
  [[nodiscard]] std::size_t trace() const;
  [[nodiscard]] std::size_t support(std::size_t cls) const;    ///< row sum
  [[nodiscard]] std::size_t predicted(std::size_t cls) const;  ///< column sum

 private:
  std::size_t k_;
  std::vector<std::size_t> counts_;
};

/// Row-wise argmax; ties go to the lower class index.
std::vector<int> predict_classes(const Matrix& probs);

struct BinaryRates {
  double sen = 0, spe = 0, acc = 0, g_mean = 0, ba_acc = 0;
};

/// Positive class is 1. Throws ValueError when a class is missing (SEN or
/// SPE would be undefined).
BinaryRates binary_rates(std::size_t tp, std::size_t fn, std::size_t tn, std::size_t fp);
/// Predictions are the argmax of each probability row (n x 2).
BinaryRates binary_rates(const Matrix& probs, std::span<const int> labels);

/// Mann-Whitney AUC, ties count 1/2. Throws ValueError on single-class input.
double auc_roc(std::span<const double> scores, std::span<const int> labels);
/// Average precision (step interpolation over distinct score thresholds), positive class 1.
double auprc(std::span<const double> scores, std::span<const int> labels);

struct MulticlassReport {
  double acc = 0;
  std::vector<double> per_class_acc;  ///< recall of each class
  double weighted_f1 = 0;
  double macro_f1 = 0;
  double auc = 0;                     ///< macro one-vs-rest
  bool empty_class = false;           ///< some class had no true samples
  ConfusionMatrix confusion{0};
};

MulticlassReport multiclass_report(const Matrix& probs, std::span<const int> labels);

/// Flat, ordered metric set for one evaluation.
///
/// Binary fields: SEN, SPE, ACC, G_mean, Ba_ACC, AUPRC, AUC.
/// Multiclass fields: ACC, ACC_class_<c> for each class, weighted_F1, macro_F1, AUC.
struct MetricsReport {
  enum class Task { kBinary, kMulticlass };

  Task task = Task::kBinary;
  std::size_t n = 0;
  std::vector<std::pair<std::string, double>> values;

  [[nodiscard]] double get(const std::string& name) const;
  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] std::vector<std::string> csv_header() const;
  [[nodiscard]] std::vector<std::string> csv_row() const;
  static MetricsReport from_json(const std::string& text);
};

/// Binary report when probs has two columns, multiclass otherwise.
MetricsReport evaluate_predictions(const Matrix& probs, std::span<const int> labels);

/// Mean and (population) standard deviation of each field across reports
/// that share the same field list.
struct MetricSummary {
  std::string name;
  double mean = 0;
  double std = 0;
};
std::vector<MetricSummary> summarize(std::span<const MetricsReport> reports);

// Wilcoxon signed-rank test on paired samples.

enum class WilcoxonMethod { kAuto, kExact, kNormal };

struct WilcoxonResult {
  double w_plus = 0;
  double w_minus = 0;
  double statistic = 0;  ///< min(W+, W-)
  double p_value = 1;    ///< two-sided
  std::size_t n = 0;     ///< pairs left after dropping zero differences
  bool exact = false;
};

/// Zero differences are dropped; tied |d| get average ranks. kAuto uses the
/// exact null distribution for n <= 12 and the tie-corrected normal
/// approximation (with continuity correction) above that. Throws ValueError
/// for unequal lengths, all-zero differences ("degenerate pairs"), or fewer
/// than 5 usable pairs.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMethod method = WilcoxonMethod::kAuto);

inline constexpr std::size_t kWilcoxonExactMaxN = 12;

}  // namespace cfdlab
