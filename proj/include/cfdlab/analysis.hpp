// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "cfdlab/model.hpp"
#include "cfdlab/synthdata.hpp"
#include "cfdlab/train.hpp"

namespace cfdlab {

/// One decoupled feature evaluated over a whole dataset (eval mode).
struct NamedFeature {
  std::string name;  ///< F_1, F, P_1, G_{12}^1, G_{12}, ...
  bool final = false;
  Matrix values;     ///< n x dim
};

/// Raw and final decoupled features, grouped as F_1..F_M, F, P_1..P_M,
/// then for each partial subset S its G_S^j (ascending j) followed by G_S.
/// P_j is both raw and final and is listed once.
std::vector<NamedFeature> extract_features(CfdModel& model, const Dataset& data,
                                           std::size_t batch_size = 256);

/// Sample-averaged cosine similarity between every pair of features.
/// Symmetric, diagonal fixed at 1.
Matrix similarity_matrix(const std::vector<NamedFeature>& features);

/// CSV with a leading "feature" column and one column per feature.
std::string similarity_csv(const std::vector<NamedFeature>& features, const Matrix& sim);

/// Long-format dump for external embedding tools: sample,label,feature,v0..v{dim-1}.
/// Only final features are written.
std::string features_csv(const std::vector<NamedFeature>& features, const std::vector<int>& labels);

/// Column means of the gate weights.
std::vector<double> mean_gates(const Matrix& gates);

/// Per-sample gate rows plus a trailing "mean" row; columns are the
/// lattice's canonical feature names.
std::string gates_csv(const Matrix& gates, const std::vector<std::string>& names);

}  // namespace cfdlab
