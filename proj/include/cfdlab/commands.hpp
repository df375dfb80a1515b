// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cfdlab/analysis.hpp"
#include "cfdlab/run_config.hpp"

namespace cfdlab {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs `body`, reporting any exception on `err` and mapping it to an exit code.
int run_guarded(const std::function<void()>& body, std::ostream& err);

struct FoldOutcome {
  int best_epoch = -1;
  MetricsReport metrics;  ///< best-AUC parameters on the validation split
  Matrix gates;           ///< validation gate weights (empty when moe is off)
  std::vector<std::string> similarity_names;
  Matrix similarity;
};

struct TrainOutcome {
  ModelConfig model;
  std::vector<FoldOutcome> folds;
  std::vector<MetricSummary> summary;
};

/// k-fold training with every artifact written under `out_dir`:
///   config.json, metrics.json, summary.csv,
///   fold_<k>/{history.csv, best.cfdc, final.cfdc, metrics.json,
///             gates.csv, similarity.csv, features.csv}
TrainOutcome run_training(const RunConfig& rc, const Dataset& data, const ModelConfig& model,
                          const std::filesystem::path& out_dir, std::ostream& log);

/// Ablation rows in table order: (dis_ps, moe, ling) =
/// (0,0,-) (0,1,0) (0,1,1) (1,0,-) (1,1,0) (1,1,1). With M = 2 the dis_ps
/// switch has no effect and only the last three rows are kept.
std::vector<AblationFlags> ablation_rows(int num_modalities);

void cmd_gen_data(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log);
void cmd_train(const RunConfig& rc, std::ostream& log);
void cmd_ablate(const RunConfig& rc, std::ostream& log);

struct ExportRequest {
  std::filesystem::path checkpoint;
  std::optional<RunConfig> config;          ///< data source, when no dataset file is given
  std::optional<std::filesystem::path> data;
  std::filesystem::path out;
  bool use_best = true;
};

void cmd_export_gates(const ExportRequest& req, std::ostream& log);
/// Writes `out` (matrix CSV) and a features.csv next to it.
void cmd_export_similarity(const ExportRequest& req, std::ostream& log);
/// Writes the metrics JSON to `out`, or to `log` when out is empty.
void cmd_eval(const ExportRequest& req, std::ostream& log);

}  // namespace cfdlab
