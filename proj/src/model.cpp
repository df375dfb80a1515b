// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/model.hpp"

#include "cfdlab/error.hpp"

namespace cfdlab {

void ModelConfig::validate() const {
  if (num_modalities < 2 || num_modalities > 16) {
    throw ConfigError("model: num_modalities must be in [2,16], got " +
                      std::to_string(num_modalities));
  }
  if (in_dim == 0 || dim == 0) throw ConfigError("model: in_dim and dim must be positive");
  if (num_cls < 2) throw ConfigError("model: num_cls must be at least 2");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model: dropout must be in [0,1)");
  if (flags.ling && !flags.moe) throw ConfigError("model: flag 'ling' requires 'moe'");
}

SubsetLattice ModelConfig::lattice() const {
  SubsetLattice full = enumerate_subsets(num_modalities);
  return flags.dis_ps ? full : full.without_partials();
}

std::size_t count_parameters(const ModelConfig& c) {
  c.validate();
  const SubsetLattice lat = c.lattice();
  const std::size_t k = lat.final_count();
  const std::size_t d = c.dim;
  auto layer = [](std::size_t in, std::size_t out) { return in * out + out; };

  std::size_t n = lat.final_count() * layer(c.in_dim, d);  // one encoder per final feature
  if (c.flags.moe) {
    n += k * layer(d, d);
    n += c.flags.ling ? layer(k * d, d) : layer(k * d, k);
  }
  n += layer(k * d, d) + layer(d, d) + layer(d, c.num_cls);
  return n;
}

CfdModel::CfdModel(const ModelConfig& config, std::uint64_t init_seed) : config_(config) {
  config_.validate();
  lattice_ = config_.lattice();
  std::mt19937_64 rng(init_seed);
  encoders_ = CfdEncoders(lattice_, config_.in_dim, config_.dim, rng);
  fusion_ = DmfParams(lattice_.final_count(), config_.dim, config_.num_cls, config_.flags, rng);
}

ForwardResult CfdModel::forward(Tape& tape, std::span<const Matrix> inputs, Mode mode,
                                std::mt19937_64& rng) {
  if (inputs.size() != static_cast<std::size_t>(config_.num_modalities)) {
    throw ShapeError("forward: expected " + std::to_string(config_.num_modalities) +
                     " modalities, got " + std::to_string(inputs.size()));
  }
  std::vector<Var> xs;
  xs.reserve(inputs.size());
  for (const Matrix& m : inputs) {
    if (m.cols() != config_.in_dim) {
      throw ShapeError("forward: modality width " + std::to_string(m.cols()) +
                       " but model in_dim is " + std::to_string(config_.in_dim));
    }
    xs.push_back(tape.constant(m));
  }
  ForwardResult out;
  out.features = decouple(tape, xs, encoders_, lattice_);
  out.finals = out.features.final_features();
  FusionOutput fo = fuse_and_classify(tape, out.finals, fusion_, config_.dropout, mode, rng);
  out.logits = fo.logits;
  out.trace = fo.trace;
  return out;
}

LossTerms CfdModel::disentangle_losses(Tape& tape, const ForwardResult& fwd, double alpha,
                                       double beta) const {
  LossTerms t;
  if (alpha > 0.0) {
    t.shared = loss_shared(fwd.features.raw_shared);
    t.partial = loss_partial(tape, fwd.features.raw_partial, lattice_);
  }
  if (beta > 0.0) t.diff = loss_diff(fwd.finals);
  return t;
}

std::vector<Parameter*> CfdModel::parameters() {
  std::vector<Parameter*> out;
  encoders_.collect(out);
  fusion_.collect(out);
  return out;
}

std::size_t CfdModel::parameter_count() {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.size();
  return n;
}

void CfdModel::zero_grad() {
  for (Parameter* p : parameters()) p->zero_grad();
}

}  // namespace cfdlab
