// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cfdlab/cfd.hpp"
#include "cfdlab/dmf.hpp"

namespace cfdlab {

struct ModelConfig {
  int num_modalities = 3;
  std::size_t in_dim = 512;
  std::size_t dim = 32;
  std::size_t num_cls = 2;
  double dropout = 0.5;
  AblationFlags flags;

  /// Throws ConfigError on an unusable combination.
  void validate() const;
  /// Lattice for this variant: partial subsets only when dis_ps is on.
  [[nodiscard]] SubsetLattice lattice() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Exact trainable-parameter count of encoders + fusion + classifier,
/// computed from layer shapes without building the model.
std::size_t count_parameters(const ModelConfig& config);

struct ForwardResult {
  DecoupledFeatureSet features;
  std::vector<Var> finals;  ///< features.final_features()
  Var logits;
  std::optional<FusionTrace> trace;
};

/// Encoder lattice + fusion head for one ModelConfig.
class CfdModel {
 public:
  /// Weights are drawn from `init_seed` (Glorot-uniform, zero biases).
  CfdModel(const ModelConfig& config, std::uint64_t init_seed);

  CfdModel(const CfdModel&) = delete;
  CfdModel& operator=(const CfdModel&) = delete;
  CfdModel(CfdModel&&) = default;
  CfdModel& operator=(CfdModel&&) = default;

  /// `inputs` holds one batch x in_dim matrix per modality.
  ForwardResult forward(Tape& tape, std::span<const Matrix> inputs, Mode mode,
                        std::mt19937_64& rng);

  /// Disentanglement losses for a forward result. Terms whose weight is zero
  /// are skipped and left unset.
  LossTerms disentangle_losses(Tape& tape, const ForwardResult& fwd, double alpha,
                               double beta) const;

  /// Every trainable parameter in a fixed order (encoders, experts, gate, head).
  [[nodiscard]] std::vector<Parameter*> parameters();
  [[nodiscard]] std::size_t parameter_count();
  void zero_grad();

  [[nodiscard]] const ModelConfig& config() const noexcept { return config_; }
  [[nodiscard]] const SubsetLattice& lattice() const noexcept { return lattice_; }
  CfdEncoders& encoders() noexcept { return encoders_; }
  DmfParams& fusion() noexcept { return fusion_; }

 private:
  ModelConfig config_;
  SubsetLattice lattice_;
  CfdEncoders encoders_;
  DmfParams fusion_;
};

}  // namespace cfdlab
