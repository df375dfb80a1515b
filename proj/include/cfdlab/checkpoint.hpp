// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cfdlab/train.hpp"

namespace cfdlab {

// CFDC1 checkpoint layout (little-endian):
//
//   "CFDC1"  u32 version  u64 config_hash
//   str model_json  str train_json
//   u64 count, then per parameter: str name, matrix        (current params)
//   u64 count, then per parameter: str name, matrix        (best params)
//   u64 adam_step  u64 count  count x (matrix m, matrix v)
//   i32 epochs_done  str rng_state  f64 best_val_auc  i32 best_epoch
//   str history_json
//   u32 crc32 of every preceding byte
//
// str is a u64 length followed by bytes; matrix is u64 rows, u64 cols, f64 data.

inline constexpr std::string_view kCheckpointMagic = "CFDC1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const Checkpoint& ckpt);
/// Throws FormatError: kBadMagic, kChecksum (any byte altered), kTruncated,
/// kConfigMismatch (stored hash disagrees with the stored configs).
Checkpoint decode_checkpoint(std::string_view bytes, const std::string& source = "checkpoint");

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws FormatError(kConfigMismatch) unless the checkpoint was written for
/// exactly this model + training configuration.
void require_config(const Checkpoint& ckpt, const ModelConfig& model, const TrainConfig& train);

}  // namespace cfdlab
