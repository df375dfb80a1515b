// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cfdlab/autograd.hpp"
#include "cfdlab/nn.hpp"

namespace cfdlab {

/// Ablation switches. `ling` only matters when `moe` is on.
struct AblationFlags {
  bool dis_ps = true;
  bool moe = true;
  bool ling = true;

  /// "dis_ps,moe,ling" style list of the enabled switches ("none" when all off).
  [[nodiscard]] std::string to_string() const;
  /// Inverse of to_string(); also accepts an empty string for all-off.
  static AblationFlags parse(const std::string& text);

  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

/// MLP head: two hidden layers of `dim` units (ReLU + dropout after each)
/// and an output layer of num_cls units.
struct MlpClassifier {
  MlpClassifier() = default;
  MlpClassifier(std::size_t in, std::size_t dim, std::size_t num_cls, std::mt19937_64& rng);

  void collect(std::vector<Parameter*>& out);

  Linear hidden1;
  Linear hidden2;
  Linear output;
};

/// Parameters of the fusion stage for K final features.
struct DmfParams {
  DmfParams() = default;
  DmfParams(std::size_t num_features, std::size_t dim, std::size_t num_cls, AblationFlags flags,
            std::mt19937_64& rng);

  void collect(std::vector<Parameter*>& out);

  AblationFlags flags;
  std::size_t num_features = 0;
  std::size_t dim = 0;
  std::vector<Linear> experts;         ///< moe on: one per final feature
  std::optional<Linear> gate_fc;       ///< moe+ling: K*dim -> dim, produces g
  std::optional<Linear> gate_linear;   ///< moe without ling: K*dim -> K logits
  MlpClassifier classifier;
};

/// What the gate did for one batch.
struct FusionTrace {
  Var global;  ///< g, batch x dim (LinG only)
  Var omega;   ///< batch x K, each row on the simplex
  Var fused;   ///< batch x K*dim
};

/// g = gate_fc(relu(concat(S_1..S_K))).
Var global_feature(Tape& tape, std::span<const Var> features, Linear& gate_fc);
/// Row b of the result is softmax(O_b g_b), O_b the K x dim stack of the
/// features' b-th rows.
Var gate_weights(std::span<const Var> features, Var global);
/// Gate used when LinG is ablated: softmax(gate_linear(concat(S_1..S_K))).
Var gate_weights_linear(Tape& tape, std::span<const Var> features, Linear& gate_linear);
/// concat(omega_1 * Ex_1(S_1), ..., omega_K * Ex_K(S_K)).
Var fuse(Tape& tape, std::span<const Var> features, Var omega, std::span<Linear> experts);
/// Classifier logits; dropout active only in train mode.
Var classify(Tape& tape, Var fused, MlpClassifier& head, double dropout, Mode mode,
             std::mt19937_64& rng);

/// Disentanglement loss terms. Unset (invalid) terms were not computed.
struct LossTerms {
  Var shared;
  Var partial;
  Var diff;
};

/// L = L_cls + alpha (L_sh + L_ps) + beta L_diff. Terms with a zero weight
/// are ignored and may be left unset.
Var total_loss(Var classification, const LossTerms& terms, double alpha, double beta);

struct FusionOutput {
  Var logits;
  std::optional<FusionTrace> trace;  ///< absent when moe is off
};

/// Fusion + classification for the variant selected by params.flags.
/// moe off feeds concat(S_1..S_K) straight to the classifier.
FusionOutput fuse_and_classify(Tape& tape, std::span<const Var> features, DmfParams& params,
                               double dropout, Mode mode, std::mt19937_64& rng);

}  // namespace cfdlab
