// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/kfold.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>

#include "cfdlab/error.hpp"

namespace cfdlab {

std::vector<Fold> kfold_split(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValueError("kfold_split: k must be at least 2");
  if (labels.size() < k) {
    throw ValueError("kfold_split: " + std::to_string(labels.size()) + " samples for " +
                     std::to_string(k) + " folds");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [cls, members] : by_class) {
    if (members.size() < k) {
      throw ValueError("kfold_split: class " + std::to_string(cls) + " has " +
                       std::to_string(members.size()) + " members, fewer than k=" +
                       std::to_string(k));
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> val(k);
  std::size_t next = 0;
  for (auto& [cls, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) {
      val[next].push_back(i);
      next = (next + 1) % k;
    }
  }

  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(val[f].begin(), val[f].end());
    folds[f].val = val[f];
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) folds[f].train.insert(folds[f].train.end(), val[g].begin(), val[g].end());
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

}  // namespace cfdlab
