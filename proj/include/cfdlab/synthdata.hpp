// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfdlab/cfd.hpp"
#include "cfdlab/matrix.hpp"

namespace cfdlab {

/// Planted latent structure behind a synthetic dataset.
struct Provenance {
  std::size_t factor_dim = 0;
  /// Every nonempty modality subset, in final-feature order (full, singletons, partials).
  std::vector<Subset> subsets;
  /// z_S, n x factor_dim, aligned with `subsets`.
  std::vector<Matrix> factors;
  /// A_{j,S}, factor_dim x in_dim, one per member j of subsets[i] (ascending j).
  std::vector<std::vector<Matrix>> mixing;
  /// Subsets whose factors drive the label.
  std::vector<Subset> informative;
  /// (|informative| * factor_dim) x num_cls linear readout.
  Matrix readout;
  /// 1 x num_cls offsets that calibrate class frequencies.
  Matrix label_bias;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Per-modality feature matrices with class labels.
struct Dataset {
  std::vector<Matrix> modalities;  ///< M matrices, n x in_dim
  std::vector<int> labels;         ///< n labels in [0, num_cls)
  std::size_t num_cls = 0;
  std::optional<Provenance> provenance;

  [[nodiscard]] std::size_t size() const { return labels.size(); }
  [[nodiscard]] int num_modalities() const { return static_cast<int>(modalities.size()); }
  [[nodiscard]] std::size_t in_dim() const {
    return modalities.empty() ? 0 : modalities.front().cols();
  }
  /// Per-class counts.
  [[nodiscard]] std::vector<std::size_t> class_histogram() const;
  /// Throws ShapeError / ValueError if the pieces disagree.
  void validate() const;
  /// Rows `indices` of every modality plus their labels.
  [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct SynthConfig {
  int num_modalities = 3;
  std::size_t n = 1000;
  std::size_t in_dim = 512;
  std::size_t factor_dim = 8;
  std::size_t num_cls = 2;
  double noise_sigma = 0.1;
  /// Subsets of modalities (0-based) whose factors determine the label.
  std::vector<Subset> informative_subsets;
  /// Target class proportions; empty means balanced.
  std::vector<double> class_weights;
  std::uint64_t seed = 0;

  /// Throws ConfigError, naming the offending subset or field.
  void validate() const;
};

/// Draws factors, mixing maps and labels, then mixes the modalities.
/// Deterministic in config.seed.
Dataset generate(const SynthConfig& config);

/// x_j = sum_{S contains j} z_S A_{j,S}, without noise.
std::vector<Matrix> mix_modalities(const Provenance& prov, int num_modalities,
                                   std::size_t in_dim);

/// y = argmax(concat(z_S : S informative) * readout + label_bias).
std::vector<int> assign_labels(const Provenance& prov);

}  // namespace cfdlab
