// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cfdlab/metrics.hpp"
#include "cfdlab/model.hpp"
#include "cfdlab/synthdata.hpp"

namespace cfdlab {

struct TrainConfig {
  double base_lr = 5e-4;
  int epochs = 50;
  std::size_t batch_size = 32;
  int warmup_epochs = 5;
  double decay_factor = 0.8;
  int decay_every = 5;
  double weight_decay = 1e-4;
  double alpha = 1.0;  ///< weight of L_sh + L_ps
  double beta = 1.0;   ///< weight of L_diff
  /// Ramp the warmup per optimizer step instead of per epoch.
  bool per_step_warmup = false;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Per-epoch schedule: linear warmup from zero over `warmup_epochs`
/// (epoch e gets base*(e+1)/warmup), then multiply by `decay_factor` at
/// epochs warmup, warmup+decay_every, ...
double lr_at(int epoch, const TrainConfig& config);
/// Same schedule with the warmup ramp interpolated across the steps of an epoch.
double lr_at_step(int epoch, std::size_t step, std::size_t steps_per_epoch,
                  const TrainConfig& config);

/// Adam moments, one pair per parameter, in CfdModel::parameters() order.
struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::uint64_t step = 0;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// One Adam update with L2 weight decay folded into the gradient
/// (g <- g + weight_decay * theta) before the moment updates.
void adam_step(std::span<Parameter* const> params, AdamState& state, double lr,
               double weight_decay);

/// Fisher-Yates permutation of 0..n-1 drawn from `rng` (one draw per swap).
std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng);

struct EpochRecord {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;
  double loss_cls = 0;
  double loss_sh = 0;
  double loss_ps = 0;
  double loss_diff = 0;
  MetricsReport val;

  friend bool operator==(const EpochRecord& a, const EpochRecord& b) {
    return a.epoch == b.epoch && a.lr == b.lr && a.train_loss == b.train_loss &&
           a.loss_cls == b.loss_cls && a.loss_sh == b.loss_sh && a.loss_ps == b.loss_ps &&
           a.loss_diff == b.loss_diff && a.val.values == b.val.values;
  }
};

struct History {
  std::vector<EpochRecord> epochs;

  /// epoch, lr, train_loss, loss_cls, loss_sh, loss_ps, loss_diff, val_<metric>...
  [[nodiscard]] std::string to_csv() const;
  [[nodiscard]] std::string to_json() const;
  static History from_json(const std::string& text);

  friend bool operator==(const History&, const History&) = default;
};

/// Complete training state; see checkpoint.hpp for the file format.
struct Checkpoint {
  ModelConfig model;
  TrainConfig train;
  std::vector<Parameter> params;       ///< values only (grads unused)
  std::vector<Parameter> best_params;  ///< snapshot at best val AUC; may be empty
  AdamState adam;
  int epochs_done = 0;
  std::string rng_state;
  double best_val_auc = -1.0;
  int best_epoch = -1;
  History history;

  /// Rebuilds a model carrying these parameter values.
  [[nodiscard]] CfdModel make_model(bool use_best = false) const;

  friend bool operator==(const Checkpoint&, const Checkpoint&);
};

/// Hash of the model + training configuration stored in checkpoints.
std::uint64_t config_hash(const ModelConfig& model, const TrainConfig& train);

struct Prediction;

struct FitOptions {
  /// Continue from this state; its config hash must match.
  const Checkpoint* resume = nullptr;
  /// Stop once this many epochs are done (<0: run all). Used for resume tests.
  int stop_after = -1;
  /// Called after every epoch with the current state.
  std::function<void(const Checkpoint&)> on_epoch_end;
  /// Sees the validation prediction of every epoch.
  std::function<void(int epoch, const Prediction&)> on_validation;
};

struct FitResult {
  Checkpoint final_state;
  Checkpoint best_state;  ///< params at the epoch with the highest val AUC
  History history;
};

/// Mini-batch training of CfdModel on `train`, validated on `val` each epoch.
/// Throws NumericalError naming the epoch and batch if the loss diverges.
FitResult fit(const Dataset& train, const Dataset& val, const ModelConfig& model_config,
              const TrainConfig& train_config, const FitOptions& options = {});

/// Eval-mode forward over a dataset in batches.
struct Prediction {
  Matrix probs;  ///< n x num_cls softmax probabilities
  Matrix gates;  ///< n x K gate weights; empty when moe is off
};
Prediction predict(CfdModel& model, const Dataset& data, std::size_t batch_size = 256);

/// Metrics of `model` on `data` (eval mode).
MetricsReport evaluate(CfdModel& model, const Dataset& data, std::size_t batch_size = 256);

}  // namespace cfdlab
