// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cfdlab {

struct Fold {
  std::vector<std::size_t> train;  ///< ascending
  std::vector<std::size_t> val;    ///< ascending
};

/// Stratified k-fold split. Each class is shuffled with `seed` and dealt
/// round-robin across folds (the dealing position carries over between
/// classes so fold sizes stay within one of each other). Throws ValueError
/// if k < 2, n < k, or a present class has fewer than k members.
std::vector<Fold> kfold_split(std::span<const int> labels, std::size_t k, std::uint64_t seed);

}  // namespace cfdlab
