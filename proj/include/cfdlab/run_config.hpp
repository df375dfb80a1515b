// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cfdlab/config_json.hpp"

namespace cfdlab {

// Run configuration file:
//
//   {
//     "data":  {"synth": {...}}                      generate in memory
//            | {"path": "train.cfdl"}                CFDL1 file
//            | {"csv": {"modalities": ["a.csv", ...], "labels": "y.csv", "num_cls": 2}},
//     "model": {...},   // num_modalities / in_dim / num_cls default to the data's
//     "train": {...},
//     "folds": 3,
//     "out":   "runs/demo"
//   }
//
// Relative paths are resolved against the config file's directory.

struct DataSource {
  enum class Kind { kSynth, kFile, kCsv };
  Kind kind = Kind::kSynth;
  SynthConfig synth;
  std::filesystem::path path;
  std::vector<std::filesystem::path> csv_modalities;
  std::filesystem::path csv_labels;
  std::size_t csv_num_cls = 0;
};

struct RunConfig {
  DataSource data;
  /// The "model" object as written; shape keys are filled from the data.
  Json model_json = Json::object();
  TrainConfig train;
  std::size_t folds = 3;
  std::filesystem::path out = "run";
};

/// Command-line overrides, applied after the file is read.
struct Overrides {
  std::optional<std::uint64_t> seed;  ///< sets train.seed and synth.seed
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> folds;
  std::optional<std::string> flags;
};

/// Parses and validates; throws ConfigError on any problem.
RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
void apply_overrides(RunConfig& rc, const Overrides& o);

/// Generates or loads the dataset.
Dataset load_data(const DataSource& src);
/// ModelConfig for `data`: model_json with absent shape keys taken from the data.
/// Throws ConfigError when an explicit key disagrees with the data.
ModelConfig resolve_model(const RunConfig& rc, const Dataset& data);

/// Round-trippable snapshot of a run configuration.
Json to_json(const RunConfig& rc);

}  // namespace cfdlab
