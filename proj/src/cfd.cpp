// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/cfd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cfdlab/error.hpp"

namespace cfdlab {

Subset Subset::of(std::initializer_list<int> members) {
  std::uint32_t m = 0;
  for (int i : members) {
    if (i < 0 || i >= 32) throw ValueError("Subset: modality index out of range");
    m |= 1u << i;
  }
  return Subset(m);
}

int Subset::size() const noexcept { return std::popcount(mask_); }

std::vector<int> Subset::members() const {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

std::string Subset::label(int num_modalities) const {
  std::string s;
  for (int i : members()) {
    if (!s.empty() && num_modalities >= 10) s += ',';
    s += std::to_string(i + 1);
  }
  return s;
}

std::size_t SubsetLattice::raw_count() const {
  std::size_t n = 2 * specifics.size();
  for (const Subset& s : partials) n += static_cast<std::size_t>(s.size());
  return n;
}

SubsetLattice SubsetLattice::without_partials() const {
  SubsetLattice out = *this;
  out.partials.clear();
  return out;
}

std::vector<Subset> SubsetLattice::feature_subsets() const {
  std::vector<Subset> out{full};
  out.insert(out.end(), specifics.begin(), specifics.end());
  out.insert(out.end(), partials.begin(), partials.end());
  return out;
}

std::vector<std::string> SubsetLattice::feature_names() const {
  std::vector<std::string> names{"F"};
  for (const Subset& s : specifics) names.push_back("P_" + s.label(num_modalities));
  for (const Subset& s : partials) names.push_back("G_{" + s.label(num_modalities) + "}");
  return names;
}

SubsetLattice enumerate_subsets(int num_modalities) {
  if (num_modalities < 2) {
    throw ValueError("enumerate_subsets: need at least 2 modalities, got " +
                     std::to_string(num_modalities));
  }
  if (num_modalities > 16) throw ValueError("enumerate_subsets: at most 16 modalities supported");
  SubsetLattice lat;
  lat.num_modalities = num_modalities;
  const std::uint32_t full = (1u << num_modalities) - 1u;
  lat.full = Subset(full);
  for (int j = 0; j < num_modalities; ++j) lat.specifics.emplace_back(1u << j);
  for (std::uint32_t m = 1; m < full; ++m) {
    const int k = std::popcount(m);
    if (k >= 2) lat.partials.emplace_back(m);
  }
  std::sort(lat.partials.begin(), lat.partials.end(), [](Subset a, Subset b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.members() < b.members();
  });
  return lat;
}

CfdEncoders::CfdEncoders(const SubsetLattice& lattice, std::size_t in_dim, std::size_t dim,
                         std::mt19937_64& rng)
    : shared("enc.shared", in_dim, dim, rng) {
  const int m = lattice.num_modalities;
  for (const Subset& s : lattice.specifics)
    specific.emplace_back("enc.specific." + s.label(m), in_dim, dim, rng);
  for (const Subset& s : lattice.partials)
    partial.emplace_back("enc.partial." + s.label(m), in_dim, dim, rng);
}

void CfdEncoders::collect(std::vector<Parameter*>& out) {
  shared.collect(out);
  for (Linear& l : specific) l.collect(out);
  for (Linear& l : partial) l.collect(out);
}

std::vector<Var> DecoupledFeatureSet::final_features() const {
  std::vector<Var> out{shared};
  out.insert(out.end(), specific.begin(), specific.end());
  out.insert(out.end(), partial.begin(), partial.end());
  return out;
}

DecoupledFeatureSet decouple(Tape& tape, std::span<const Var> inputs, CfdEncoders& enc,
                             const SubsetLattice& lattice) {
  const auto m = static_cast<std::size_t>(lattice.num_modalities);
  if (inputs.size() != m) {
    throw ShapeError("decouple: expected " + std::to_string(m) + " modalities, got " +
                     std::to_string(inputs.size()));
  }
  if (enc.specific.size() != m || enc.partial.size() != lattice.partials.size()) {
    throw ShapeError("decouple: encoder lattice does not match subset lattice");
  }
  for (const Var& x : inputs) {
    if (x.rows() != inputs[0].rows() || x.cols() != inputs[0].cols()) {
      throw ShapeError("decouple: modality shape " + x.value().shape_str() + " differs from " +
                       inputs[0].value().shape_str());
    }
  }

  DecoupledFeatureSet out;
  for (std::size_t j = 0; j < m; ++j) {
    out.raw_shared.push_back(enc.shared(tape, inputs[j]));
    out.specific.push_back(enc.specific[j](tape, inputs[j]));
  }
  out.shared = ag::mean(out.raw_shared);
  for (std::size_t s = 0; s < lattice.partials.size(); ++s) {
    std::vector<Var> group;
    for (int j : lattice.partials[s].members())
      group.push_back(enc.partial[s](tape, inputs[static_cast<std::size_t>(j)]));
    out.partial.push_back(ag::mean(group));
    out.raw_partial.push_back(std::move(group));
  }
  return out;
}

namespace {

Var pairwise_mse_sum(std::span<const Var> xs) {
  Var total = ag::mse(xs[0], xs[1]);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    for (std::size_t k = j + 1; k < xs.size(); ++k) {
      if (j == 0 && k == 1) continue;
      total = ag::add(total, ag::mse(xs[j], xs[k]));
    }
  }
  return total;
}

}  // namespace

Var loss_shared(std::span<const Var> raw_shared) {
  if (raw_shared.size() < 2) throw ValueError("loss_shared: need at least 2 shared features");
  return pairwise_mse_sum(raw_shared);
}

Var loss_partial(Tape& tape, const std::vector<std::vector<Var>>& raw_partial,
                 const SubsetLattice& lattice) {
  if (raw_partial.size() != lattice.partials.size()) {
    throw ValueError("loss_partial: " + std::to_string(raw_partial.size()) + " groups for " +
                     std::to_string(lattice.partials.size()) + " partial subsets");
  }
  if (raw_partial.empty()) return tape.constant(Matrix(1, 1));
  Var total;
  for (std::size_t s = 0; s < raw_partial.size(); ++s) {
    const auto want = static_cast<std::size_t>(lattice.partials[s].size());
    if (raw_partial[s].size() != want) {
      throw ValueError("loss_partial: group G_{" + lattice.partials[s].label(lattice.num_modalities) +
                       "} has " + std::to_string(raw_partial[s].size()) + " of " +
                       std::to_string(want) + " members");
    }
    Var group = pairwise_mse_sum(raw_partial[s]);
    total = total.valid() ? ag::add(total, group) : group;
  }
  return total;
}

Var loss_diff(std::span<const Var> final_features) {
  if (final_features.size() < 2) throw ValueError("loss_diff: need at least 2 final features");
  Var total;
  for (std::size_t j = 0; j < final_features.size(); ++j) {
    for (std::size_t k = j + 1; k < final_features.size(); ++k) {
      Var cs = ag::cosine_similarity(final_features[j], final_features[k]);
      total = total.valid() ? ag::add(total, cs) : cs;
    }
  }
  return total;
}

}  // namespace cfdlab
