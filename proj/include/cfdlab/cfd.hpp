// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cfdlab/autograd.hpp"
#include "cfdlab/nn.hpp"

namespace cfdlab {

/// A set of modality indices (0-based) packed into a bitmask.
class Subset {
 public:
  constexpr Subset() = default;
  constexpr explicit Subset(std::uint32_t mask) : mask_(mask) {}
  static Subset of(std::initializer_list<int> members);

  [[nodiscard]] constexpr std::uint32_t mask() const noexcept { return mask_; }
  [[nodiscard]] int size() const noexcept;
  [[nodiscard]] bool contains(int modality) const noexcept { return (mask_ >> modality) & 1u; }
  /// Member indices, ascending.
  [[nodiscard]] std::vector<int> members() const;
  /// 1-based member digits, e.g. {0,1} -> "12"; comma-separated once M >= 10.
  [[nodiscard]] std::string label(int num_modalities) const;

  friend constexpr bool operator==(Subset, Subset) = default;

 private:
  std::uint32_t mask_ = 0;
};

/// Canonical enumeration of the modality subsets used by the disentanglement.
struct SubsetLattice {
  int num_modalities = 0;
  std::vector<Subset> specifics;  ///< the M singletons
  std::vector<Subset> partials;   ///< sizes 2..M-1, ascending size then lexicographic
  Subset full;

  /// 1 + M + |partials|.
  [[nodiscard]] std::size_t final_count() const { return 1 + specifics.size() + partials.size(); }
  /// M shared + M specific + sum over partial groups of the group size.
  [[nodiscard]] std::size_t raw_count() const;
  /// The same lattice with every partial subset dropped.
  [[nodiscard]] SubsetLattice without_partials() const;
  /// Subsets in final-feature order: full, singletons, partials.
  [[nodiscard]] std::vector<Subset> feature_subsets() const;
  /// Display names in final-feature order: F, P_1.., G_{12}..
  [[nodiscard]] std::vector<std::string> feature_names() const;
};

/// Enumerates the lattice for M >= 2 modalities. M is capped at 16.
SubsetLattice enumerate_subsets(int num_modalities);

/// Encoder lattice: one shared, M specific, one per partial subset.
struct CfdEncoders {
  CfdEncoders() = default;
  CfdEncoders(const SubsetLattice& lattice, std::size_t in_dim, std::size_t dim,
              std::mt19937_64& rng);

  [[nodiscard]] std::size_t encoder_count() const { return 1 + specific.size() + partial.size(); }
  void collect(std::vector<Parameter*>& out);

  Linear shared;
  std::vector<Linear> specific;
  std::vector<Linear> partial;  ///< aligned with SubsetLattice::partials
};

/// Features produced by decouple(). Raw per-modality features are kept for
/// the similarity losses; `final_features()` is the ordered fusion input.
struct DecoupledFeatureSet {
  Var shared;                             ///< F = mean_j F_j
  std::vector<Var> specific;              ///< P_j
  std::vector<Var> partial;               ///< G_S, aligned with lattice.partials
  std::vector<Var> raw_shared;            ///< F_j
  std::vector<std::vector<Var>> raw_partial;  ///< G_S^j for j in S (ascending j)

  /// [F, P_1..P_M, G_S in canonical order], length 2^M - 1 for a full lattice.
  [[nodiscard]] std::vector<Var> final_features() const;
};

/// Runs every encoder on its modalities and aggregates by averaging.
/// All modality inputs must share batch size and width.
DecoupledFeatureSet decouple(Tape& tape, std::span<const Var> inputs, CfdEncoders& enc,
                             const SubsetLattice& lattice);

/// Sum over unordered pairs j<k of MSE(F_j, F_k).
Var loss_shared(std::span<const Var> raw_shared);
/// Sum over partial groups of the pairwise MSE inside each group. Group i
/// must hold one feature per member of lattice.partials[i]. Returns a
/// constant 0 on `tape` when there are no groups.
Var loss_partial(Tape& tape, const std::vector<std::vector<Var>>& raw_partial,
                 const SubsetLattice& lattice);
/// Sum over unordered pairs of final features of their (signed) cosine similarity.
Var loss_diff(std::span<const Var> final_features);

}  // namespace cfdlab
