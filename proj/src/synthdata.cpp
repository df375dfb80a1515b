// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cfdlab/error.hpp"
#include "cfdlab/kernels.hpp"

namespace cfdlab {

std::vector<std::size_t> Dataset::class_histogram() const {
  std::vector<std::size_t> h(num_cls, 0);
  for (int y : labels) {
    if (y >= 0 && static_cast<std::size_t>(y) < num_cls) ++h[static_cast<std::size_t>(y)];
  }
  return h;
}

void Dataset::validate() const {
  if (modalities.empty()) throw ShapeError("dataset: no modalities");
  for (const Matrix& m : modalities) {
    if (m.rows() != labels.size() || m.cols() != modalities.front().cols()) {
      throw ShapeError("dataset: modality " + m.shape_str() + " vs " +
                       std::to_string(labels.size()) + " labels x in_dim " +
                       std::to_string(modalities.front().cols()));
    }
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_cls) {
      throw ValueError("dataset: label " + std::to_string(y) + " outside [0," +
                       std::to_string(num_cls) + ")");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.num_cls = num_cls;
  for (const Matrix& m : modalities) out.modalities.push_back(m.gather_rows(indices));
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels.at(i));
  return out;
}

void SynthConfig::validate() const {
  if (num_modalities < 2 || num_modalities > 16) {
    throw ConfigError("synth: num_modalities must be in [2,16]");
  }
  if (in_dim == 0 || factor_dim == 0) throw ConfigError("synth: in_dim and factor_dim must be > 0");
  if (num_cls < 2) throw ConfigError("synth: num_cls must be at least 2");
  if (n < num_cls) throw ConfigError("synth: n must be at least num_cls");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("synth: noise_sigma must be finite and >= 0");
  }
  if (informative_subsets.empty()) throw ConfigError("synth: informative_subsets is empty");
  const std::uint32_t full = (1u << num_modalities) - 1u;
  for (const Subset& s : informative_subsets) {
    if (s.mask() == 0 || (s.mask() & ~full) != 0) {
      std::string members;
      for (int i : s.members()) members += (members.empty() ? "" : ",") + std::to_string(i + 1);
      throw ConfigError("synth: informative subset {" + members + "} is not a subset of the " +
                        std::to_string(num_modalities) + " modalities");
    }
  }
  if (!class_weights.empty()) {
    if (class_weights.size() != num_cls) {
      throw ConfigError("synth: class_weights needs one entry per class");
    }
    for (double w : class_weights)
      if (!(w > 0.0)) throw ConfigError("synth: class_weights must be positive");
  }
}

namespace {

Matrix normal_matrix(std::size_t rows, std::size_t cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

Matrix informative_logits(const Provenance& prov) {
  const std::size_t n = prov.factors.front().rows();
  const std::size_t fd = prov.factor_dim;
  Matrix z(n, prov.informative.size() * fd);
  for (std::size_t i = 0; i < prov.informative.size(); ++i) {
    const auto it = std::find(prov.subsets.begin(), prov.subsets.end(), prov.informative[i]);
    const Matrix& f = prov.factors[static_cast<std::size_t>(it - prov.subsets.begin())];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < fd; ++c) z(r, i * fd + c) = f(r, c);
  }
  Matrix logits(n, prov.readout.cols());
  kernels::serial::gemm_nn(n, logits.cols(), z.cols(), z.data().data(),
                           prov.readout.data().data(), logits.data().data());
  return logits;
}

std::vector<int> argmax_rows(const Matrix& logits, const Matrix& bias) {
  std::vector<int> y(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.cols(); ++c)
      if (logits(r, c) + bias(0, c) > logits(r, best) + bias(0, best)) best = c;
    y[r] = static_cast<int>(best);
  }
  return y;
}

// Offsets b such that argmax(logits + b) hits the target class frequencies.
Matrix calibrate_bias(const Matrix& logits, const std::vector<double>& weights) {
  const std::size_t k = logits.cols();
  const auto n = static_cast<double>(logits.rows());
  double sd = 0.0;
  for (double v : logits.data()) sd += v * v;
  sd = std::sqrt(sd / static_cast<double>(logits.size())) + 1e-12;

  Matrix bias(1, k);
  Matrix best = bias;
  double best_err = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 2000; ++iter) {
    const std::vector<int> y = argmax_rows(logits, bias);
    std::vector<double> counts(k, 0.0);
    for (int c : y) counts[static_cast<std::size_t>(c)] += 1.0;
    double err = 0.0;
    for (std::size_t c = 0; c < k; ++c) err = std::max(err, std::abs(counts[c] - weights[c] * n));
    if (err < best_err) {
      best_err = err;
      best = bias;
    }
    if (err <= 1.0) break;
    const double step = 0.5 * sd / (1.0 + 0.01 * iter);
    for (std::size_t c = 0; c < k; ++c)
      bias(0, c) += step * std::log((weights[c] * n + 0.5) / (counts[c] + 0.5));
  }
  return best;
}

}  // namespace

std::vector<Matrix> mix_modalities(const Provenance& prov, int num_modalities,
                                   std::size_t in_dim) {
  const std::size_t n = prov.factors.front().rows();
  std::vector<Matrix> xs(static_cast<std::size_t>(num_modalities), Matrix(n, in_dim));
  Matrix part(n, in_dim);
  for (std::size_t s = 0; s < prov.subsets.size(); ++s) {
    const std::vector<int> members = prov.subsets[s].members();
    for (std::size_t m = 0; m < members.size(); ++m) {
      kernels::serial::gemm_nn(n, in_dim, prov.factor_dim, prov.factors[s].data().data(),
                               prov.mixing[s][m].data().data(), part.data().data());
      xs[static_cast<std::size_t>(members[m])].add_inplace(part);
    }
  }
  return xs;
}

std::vector<int> assign_labels(const Provenance& prov) {
  return argmax_rows(informative_logits(prov), prov.label_bias);
}

Dataset generate(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const int m = config.num_modalities;
  const std::size_t fd = config.factor_dim;

  Provenance prov;
  prov.factor_dim = fd;
  prov.subsets = enumerate_subsets(m).feature_subsets();
  prov.informative = config.informative_subsets;

  for (std::size_t s = 0; s < prov.subsets.size(); ++s)
    prov.factors.push_back(normal_matrix(config.n, fd, 1.0, rng));

  // Each modality takes part in 2^(M-1) subsets; scale the maps so every
  // noiseless feature has unit variance.
  const double participation = std::ldexp(1.0, m - 1);
  const double map_sd = 1.0 / std::sqrt(static_cast<double>(fd) * participation);
  for (const Subset& s : prov.subsets) {
    std::vector<Matrix> maps;
    for ([[maybe_unused]] int j : s.members())
      maps.push_back(normal_matrix(fd, config.in_dim, map_sd, rng));
    prov.mixing.push_back(std::move(maps));
  }
  prov.readout = normal_matrix(prov.informative.size() * fd, config.num_cls, 1.0, rng);

  std::vector<double> weights = config.class_weights;
  if (weights.empty()) weights.assign(config.num_cls, 1.0);
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= wsum;
  prov.label_bias = calibrate_bias(informative_logits(prov), weights);

  Dataset d;
  d.num_cls = config.num_cls;
  d.labels = assign_labels(prov);
  d.modalities = mix_modalities(prov, m, config.in_dim);
  if (config.noise_sigma > 0.0) {
    for (Matrix& x : d.modalities) {
      std::normal_distribution<double> noise(0.0, config.noise_sigma);
      for (double& v : x.data()) v += noise(rng);
    }
  }
  d.provenance = std::move(prov);
  return d;
}

}  // namespace cfdlab
