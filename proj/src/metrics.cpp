// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "cfdlab/csv.hpp"
#include "cfdlab/error.hpp"

namespace cfdlab {

ConfusionMatrix ConfusionMatrix::from(std::span<const int> predicted, std::span<const int> truth,
                                      std::size_t num_cls) {
  if (predicted.size() != truth.size()) throw ShapeError("confusion: length mismatch");
  ConfusionMatrix cm(num_cls);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= k_ ||
      static_cast<std::size_t>(predicted) >= k_) {
    throw ValueError("confusion: class index outside [0," + std::to_string(k_) + ")");
  }
  ++counts_[static_cast<std::size_t>(truth) * k_ + static_cast<std::size_t>(predicted)];
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < k_; ++i) t += (*this)(i, i);
  return t;
}

std::size_t ConfusionMatrix::support(std::size_t cls) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < k_; ++p) s += (*this)(cls, p);
  return s;
}

std::size_t ConfusionMatrix::predicted(std::size_t cls) const {
  std::size_t s = 0;
  for (std::size_t t = 0; t < k_; ++t) s += (*this)(t, cls);
  return s;
}

std::vector<int> predict_classes(const Matrix& probs) {
  std::vector<int> out(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < probs.cols(); ++c)
      if (probs(r, c) > probs(r, best)) best = c;
    out[r] = static_cast<int>(best);
  }
  return out;
}

BinaryRates binary_rates(std::size_t tp, std::size_t fn, std::size_t tn, std::size_t fp) {
  if (tp + fn == 0) throw ValueError("binary_rates: no positive samples, SEN undefined");
  if (tn + fp == 0) throw ValueError("binary_rates: no negative samples, SPE undefined");
  BinaryRates r;
  r.sen = static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.spe = static_cast<double>(tn) / static_cast<double>(tn + fp);
  r.acc = static_cast<double>(tp + tn) / static_cast<double>(tp + fn + tn + fp);
  r.g_mean = std::sqrt(r.sen * r.spe);
  r.ba_acc = 0.5 * (r.sen + r.spe);
  return r;
}

BinaryRates binary_rates(const Matrix& probs, std::span<const int> labels) {
  if (probs.cols() != 2 || probs.rows() != labels.size()) {
    throw ShapeError("binary_rates: expected n x 2 probabilities for " +
                     std::to_string(labels.size()) + " labels, got " + probs.shape_str());
  }
  const ConfusionMatrix cm = ConfusionMatrix::from(predict_classes(probs), labels, 2);
  return binary_rates(cm(1, 1), cm(1, 0), cm(0, 0), cm(0, 1));
}

namespace {

void check_binary_inputs(const char* op, std::span<const double> scores,
                         std::span<const int> labels, std::size_t& pos, std::size_t& neg) {
  if (scores.size() != labels.size()) throw ShapeError(std::string(op) + ": length mismatch");
  pos = neg = 0;
  for (int y : labels) {
    if (y == 1) {
      ++pos;
    } else if (y == 0) {
      ++neg;
    } else {
      throw ValueError(std::string(op) + ": labels must be 0 or 1");
    }
  }
  if (pos == 0 || neg == 0) throw ValueError(std::string(op) + ": needs both classes present");
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  std::size_t pos = 0, neg = 0;
  check_binary_inputs("auc_roc", scores, labels, pos, neg);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of (1-based, tie-averaged) ranks of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) rank_sum += avg_rank;
    i = j;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double auprc(std::span<const double> scores, std::span<const int> labels) {
  std::size_t pos = 0, neg = 0;
  check_binary_inputs("auprc", scores, labels, pos, neg);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double ap = 0.0, prev_recall = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) ++tp;
      ++j;
    }
    seen = j;
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

MulticlassReport multiclass_report(const Matrix& probs, std::span<const int> labels) {
  if (probs.rows() != labels.size() || probs.cols() < 2) {
    throw ShapeError("multiclass_report: probabilities " + probs.shape_str() + " for " +
                     std::to_string(labels.size()) + " labels");
  }
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const auto row = probs.row(r);
    if (std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) > 1e-6) {
      throw ValueError("multiclass_report: probability row " + std::to_string(r) +
                       " does not sum to 1");
    }
  }
  const std::size_t k = probs.cols();
  MulticlassReport rep;
  rep.confusion = ConfusionMatrix::from(predict_classes(probs), labels, k);
  const ConfusionMatrix& cm = rep.confusion;
  const auto n = static_cast<double>(cm.total());
  rep.acc = static_cast<double>(cm.trace()) / n;

  double f1_sum = 0.0, f1_weighted = 0.0, auc_sum = 0.0;
  std::size_t auc_classes = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const auto support = static_cast<double>(cm.support(c));
    const auto predicted = static_cast<double>(cm.predicted(c));
    const auto tp = static_cast<double>(cm(c, c));
    double recall = 0.0, f1 = 0.0;
    if (support == 0) {
      rep.empty_class = true;
    } else {
      recall = tp / support;
      const double precision = predicted > 0 ? tp / predicted : 0.0;
      f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    rep.per_class_acc.push_back(recall);
    f1_sum += f1;
    f1_weighted += f1 * support;

    if (support > 0 && support < n) {
      std::vector<double> scores(probs.rows());
      std::vector<int> onehot(probs.rows());
      for (std::size_t r = 0; r < probs.rows(); ++r) {
        scores[r] = probs(r, c);
        onehot[r] = labels[r] == static_cast<int>(c) ? 1 : 0;
      }
      auc_sum += auc_roc(scores, onehot);
      ++auc_classes;
    }
  }
  rep.macro_f1 = f1_sum / static_cast<double>(k);
  rep.weighted_f1 = f1_weighted / n;
  rep.auc = auc_classes > 0 ? auc_sum / static_cast<double>(auc_classes) : 0.5;
  return rep;
}

double MetricsReport::get(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw ValueError("metrics: no field '" + name + "'");
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = task == Task::kBinary ? "binary" : "multiclass";
  j["n"] = n;
  for (const auto& [k, v] : values) j[k] = v;
  return j.dump(2);
}

MetricsReport MetricsReport::from_json(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  MetricsReport r;
  r.task = j.at("task").get<std::string>() == "binary" ? Task::kBinary : Task::kMulticlass;
  r.n = j.at("n").get<std::size_t>();
  for (const auto& [k, v] : j.items()) {
    if (k == "task" || k == "n") continue;
    r.values.emplace_back(k, v.get<double>());
  }
  return r;
}

std::vector<std::string> MetricsReport::csv_header() const {
  std::vector<std::string> h{"n"};
  for (const auto& kv : values) h.push_back(kv.first);
  return h;
}

std::vector<std::string> MetricsReport::csv_row() const {
  std::vector<std::string> r{std::to_string(n)};
  for (const auto& kv : values) r.push_back(csv::format_double(kv.second));
  return r;
}

MetricsReport evaluate_predictions(const Matrix& probs, std::span<const int> labels) {
  MetricsReport rep;
  rep.n = labels.size();
  if (probs.cols() == 2) {
    rep.task = MetricsReport::Task::kBinary;
    const BinaryRates b = binary_rates(probs, labels);
    std::vector<double> scores(probs.rows());
    for (std::size_t r = 0; r < probs.rows(); ++r) scores[r] = probs(r, 1);
    rep.values = {{"SEN", b.sen},       {"SPE", b.spe},
                  {"ACC", b.acc},       {"G_mean", b.g_mean},
                  {"Ba_ACC", b.ba_acc}, {"AUPRC", auprc(scores, labels)},
                  {"AUC", auc_roc(scores, labels)}};
  } else {
    rep.task = MetricsReport::Task::kMulticlass;
    const MulticlassReport m = multiclass_report(probs, labels);
    rep.values.emplace_back("ACC", m.acc);
    for (std::size_t c = 0; c < m.per_class_acc.size(); ++c)
      rep.values.emplace_back("ACC_class_" + std::to_string(c), m.per_class_acc[c]);
    rep.values.emplace_back("weighted_F1", m.weighted_f1);
    rep.values.emplace_back("macro_F1", m.macro_f1);
    rep.values.emplace_back("AUC", m.auc);
  }
  return rep;
}

std::vector<MetricSummary> summarize(std::span<const MetricsReport> reports) {
  std::vector<MetricSummary> out;
  if (reports.empty()) return out;
  const auto count = static_cast<double>(reports.size());
  for (std::size_t f = 0; f < reports.front().values.size(); ++f) {
    MetricSummary s;
    s.name = reports.front().values[f].first;
    for (const MetricsReport& r : reports) {
      if (r.values.size() != reports.front().values.size() || r.values[f].first != s.name) {
        throw ValueError("summarize: reports have different fields");
      }
      s.mean += r.values[f].second;
    }
    s.mean /= count;
    for (const MetricsReport& r : reports) {
      const double d = r.values[f].second - s.mean;
      s.std += d * d;
    }
    s.std = std::sqrt(s.std / count);
    out.push_back(s);
  }
  return out;
}

}  // namespace cfdlab
