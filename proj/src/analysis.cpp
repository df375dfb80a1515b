// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/analysis.hpp"

#include <numeric>

#include "cfdlab/csv.hpp"
#include "cfdlab/error.hpp"

namespace cfdlab {

std::vector<NamedFeature> extract_features(CfdModel& model, const Dataset& data,
                                           std::size_t batch_size) {
  if (batch_size == 0) throw ValueError("extract_features: batch_size must be positive");
  const SubsetLattice& lat = model.lattice();
  const int m = lat.num_modalities;
  const std::size_t n = data.size();
  const std::size_t dim = model.config().dim;

  // Slot layout follows the documented grouping.
  std::vector<NamedFeature> out;
  auto add = [&](std::string name, bool final) {
    out.push_back({std::move(name), final, Matrix(n, dim)});
  };
  for (int j = 1; j <= m; ++j) add("F_" + std::to_string(j), false);
  add("F", true);
  for (int j = 1; j <= m; ++j) add("P_" + std::to_string(j), true);
  for (const Subset& s : lat.partials) {
    const std::string g = "G_{" + s.label(m) + "}";
    for (int j : s.members()) add(g + "^" + std::to_string(j + 1), false);
    add(g, true);
  }

  std::mt19937_64 unused(0);
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    std::vector<Matrix> inputs;
    for (const Matrix& x : data.modalities) inputs.push_back(x.gather_rows(idx));
    Tape tape;
    const ForwardResult fwd = model.forward(tape, inputs, Mode::kEval, unused);
    const DecoupledFeatureSet& f = fwd.features;

    std::vector<const Matrix*> batch;
    for (const Var& v : f.raw_shared) batch.push_back(&v.value());
    batch.push_back(&f.shared.value());
    for (const Var& v : f.specific) batch.push_back(&v.value());
    for (std::size_t g = 0; g < f.partial.size(); ++g) {
      for (const Var& v : f.raw_partial[g]) batch.push_back(&v.value());
      batch.push_back(&f.partial[g].value());
    }
    if (batch.size() != out.size()) throw ShapeError("extract_features: feature count mismatch");
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto src = batch[k]->row(r);
        std::copy(src.begin(), src.end(), out[k].values.row(start + r).begin());
      }
    }
  }
  return out;
}

Matrix similarity_matrix(const std::vector<NamedFeature>& features) {
  const std::size_t k = features.size();
  Matrix sim(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    sim(a, a) = 1.0;
    for (std::size_t b = a + 1; b < k; ++b) {
      const Matrix& x = features[a].values;
      const Matrix& y = features[b].values;
      if (!x.same_shape(y)) throw ShapeError("similarity_matrix: feature shapes differ");
      double acc = 0.0;
      for (std::size_t r = 0; r < x.rows(); ++r) acc += fn::cosine(x.row(r), y.row(r));
      const double mean = x.rows() == 0 ? 0.0 : acc / static_cast<double>(x.rows());
      sim(a, b) = mean;
      sim(b, a) = mean;
    }
  }
  return sim;
}

std::string similarity_csv(const std::vector<NamedFeature>& features, const Matrix& sim) {
  std::vector<std::string> header{"feature"};
  for (const NamedFeature& f : features) header.push_back(f.name);
  csv::Writer w(header);
  for (std::size_t r = 0; r < features.size(); ++r) {
    const auto row = sim.row(r);
    w.row(features[r].name, std::vector<double>(row.begin(), row.end()));
  }
  return w.str();
}

std::string features_csv(const std::vector<NamedFeature>& features, const std::vector<int>& labels) {
  std::size_t dim = 0;
  for (const NamedFeature& f : features) dim = std::max(dim, f.values.cols());
  std::vector<std::string> header{"sample", "label", "feature"};
  for (std::size_t d = 0; d < dim; ++d) header.push_back("v" + std::to_string(d));
  csv::Writer w(header);
  for (const NamedFeature& f : features) {
    if (!f.final) continue;
    if (f.values.rows() != labels.size()) throw ShapeError("features_csv: label count mismatch");
    for (std::size_t r = 0; r < f.values.rows(); ++r) {
      std::vector<std::string> cells{std::to_string(r), std::to_string(labels[r]), f.name};
      for (double v : f.values.row(r)) cells.push_back(csv::format_double(v));
      w.row(cells);
    }
  }
  return w.str();
}

std::vector<double> mean_gates(const Matrix& gates) {
  std::vector<double> mean(gates.cols(), 0.0);
  if (gates.rows() == 0) return mean;
  for (std::size_t r = 0; r < gates.rows(); ++r) {
    for (std::size_t c = 0; c < gates.cols(); ++c) mean[c] += gates(r, c);
  }
  for (double& v : mean) v /= static_cast<double>(gates.rows());
  return mean;
}

std::string gates_csv(const Matrix& gates, const std::vector<std::string>& names) {
  if (gates.cols() != names.size()) {
    throw ShapeError("gates_csv: " + std::to_string(gates.cols()) + " gate columns for " +
                     std::to_string(names.size()) + " names");
  }
  std::vector<std::string> header{"sample"};
  header.insert(header.end(), names.begin(), names.end());
  csv::Writer w(header);
  for (std::size_t r = 0; r < gates.rows(); ++r) {
    const auto row = gates.row(r);
    w.row(std::to_string(r), std::vector<double>(row.begin(), row.end()));
  }
  w.row("mean", mean_gates(gates));
  return w.str();
}

}  // namespace cfdlab
