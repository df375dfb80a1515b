// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/dmf.hpp"

#include <sstream>

#include "cfdlab/error.hpp"

namespace cfdlab {

std::string AblationFlags::to_string() const {
  std::string s;
  auto put = [&s](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += ',';
    s += name;
  };
  put(dis_ps, "dis_ps");
  put(moe, "moe");
  put(ling, "ling");
  return s.empty() ? "none" : s;
}

AblationFlags AblationFlags::parse(const std::string& text) {
  AblationFlags f{false, false, false};
  if (text.empty() || text == "none") return f;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "dis_ps") {
      f.dis_ps = true;
    } else if (item == "moe") {
      f.moe = true;
    } else if (item == "ling") {
      f.ling = true;
    } else {
      throw ConfigError("unknown ablation flag '" + item + "' (expected dis_ps, moe, ling)");
    }
  }
  if (f.ling && !f.moe) throw ConfigError("flag 'ling' requires 'moe'");
  return f;
}

MlpClassifier::MlpClassifier(std::size_t in, std::size_t dim, std::size_t num_cls,
                             std::mt19937_64& rng)
    : hidden1("cls.hidden1", in, dim, rng),
      hidden2("cls.hidden2", dim, dim, rng),
      output("cls.output", dim, num_cls, rng) {}

void MlpClassifier::collect(std::vector<Parameter*>& out) {
  hidden1.collect(out);
  hidden2.collect(out);
  output.collect(out);
}

DmfParams::DmfParams(std::size_t k, std::size_t d, std::size_t num_cls, AblationFlags f,
                     std::mt19937_64& rng)
    : flags(f), num_features(k), dim(d) {
  if (flags.moe) {
    for (std::size_t i = 0; i < k; ++i)
      experts.emplace_back("dmf.expert." + std::to_string(i), d, d, rng);
    if (flags.ling) {
      gate_fc.emplace("dmf.gate_fc", k * d, d, rng);
    } else {
      gate_linear.emplace("dmf.gate_linear", k * d, k, rng);
    }
  }
  classifier = MlpClassifier(k * d, d, num_cls, rng);
}

void DmfParams::collect(std::vector<Parameter*>& out) {
  for (Linear& e : experts) e.collect(out);
  if (gate_fc) gate_fc->collect(out);
  if (gate_linear) gate_linear->collect(out);
  classifier.collect(out);
}

Var global_feature(Tape& tape, std::span<const Var> features, Linear& gate_fc) {
  Var cat = ag::concat_cols(features);
  if (cat.cols() != gate_fc.in_features()) {
    throw ShapeError("global_feature: concatenated width " + std::to_string(cat.cols()) +
                     " but gate_fc expects " + std::to_string(gate_fc.in_features()));
  }
  return gate_fc(tape, ag::relu(cat));
}

Var gate_weights(std::span<const Var> features, Var global) {
  if (features.empty()) throw ValueError("gate_weights: no features");
  std::vector<Var> logits;
  logits.reserve(features.size());
  for (const Var& s : features) {
    if (s.rows() != global.rows() || s.cols() != global.cols()) {
      throw ShapeError("gate_weights: feature " + s.value().shape_str() + " vs global " +
                       global.value().shape_str());
    }
    logits.push_back(ag::row_dot(s, global));
  }
  return ag::softmax_rows(ag::concat_cols(logits));
}

Var gate_weights_linear(Tape& tape, std::span<const Var> features, Linear& gate_linear) {
  Var cat = ag::concat_cols(features);
  if (cat.cols() != gate_linear.in_features() || gate_linear.out_features() != features.size()) {
    throw ShapeError("gate_weights_linear: gate is " +
                     gate_linear.weight.value.shape_str() + " for " +
                     std::to_string(features.size()) + " features of total width " +
                     std::to_string(cat.cols()));
  }
  return ag::softmax_rows(gate_linear(tape, cat));
}

Var fuse(Tape& tape, std::span<const Var> features, Var omega, std::span<Linear> experts) {
  if (experts.size() != features.size() || omega.cols() != features.size()) {
    throw ShapeError("fuse: " + std::to_string(features.size()) + " features, " +
                     std::to_string(experts.size()) + " experts, omega " +
                     omega.value().shape_str());
  }
  std::vector<Var> blocks;
  blocks.reserve(features.size());
  for (std::size_t k = 0; k < features.size(); ++k) {
    Var expert_out = experts[k](tape, features[k]);
    blocks.push_back(ag::scale_rows(expert_out, ag::slice_cols(omega, k, k + 1)));
  }
  return ag::concat_cols(blocks);
}

Var classify(Tape& tape, Var fused, MlpClassifier& head, double dropout, Mode mode,
             std::mt19937_64& rng) {
  if (fused.cols() != head.hidden1.in_features()) {
    throw ShapeError("classify: input width " + std::to_string(fused.cols()) +
                     " but classifier expects " + std::to_string(head.hidden1.in_features()));
  }
  Var h = ag::dropout(ag::relu(head.hidden1(tape, fused)), dropout, mode, rng);
  h = ag::dropout(ag::relu(head.hidden2(tape, h)), dropout, mode, rng);
  return head.output(tape, h);
}

Var total_loss(Var classification, const LossTerms& terms, double alpha, double beta) {
  if (alpha < 0.0 || beta < 0.0) {
    throw ValueError("total_loss: loss weights must be non-negative (alpha=" +
                     std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
  }
  Var loss = classification;
  if (alpha > 0.0) {
    if (!terms.shared.valid() || !terms.partial.valid()) {
      throw ValueError("total_loss: alpha > 0 but shared/partial losses were not computed");
    }
    loss = ag::add(loss, ag::scale(ag::add(terms.shared, terms.partial), alpha));
  }
  if (beta > 0.0) {
    if (!terms.diff.valid()) throw ValueError("total_loss: beta > 0 but L_diff was not computed");
    loss = ag::add(loss, ag::scale(terms.diff, beta));
  }
  return loss;
}

FusionOutput fuse_and_classify(Tape& tape, std::span<const Var> features, DmfParams& params,
                               double dropout, Mode mode, std::mt19937_64& rng) {
  if (features.size() != params.num_features) {
    throw ShapeError("fuse_and_classify: " + std::to_string(features.size()) +
                     " features for a head built for " + std::to_string(params.num_features));
  }
  FusionOutput out;
  Var fused;
  if (params.flags.moe) {
    FusionTrace trace;
    if (params.flags.ling) {
      trace.global = global_feature(tape, features, *params.gate_fc);
      trace.omega = gate_weights(features, trace.global);
    } else {
      trace.omega = gate_weights_linear(tape, features, *params.gate_linear);
    }
    trace.fused = fuse(tape, features, trace.omega, params.experts);
    fused = trace.fused;
    out.trace = trace;
  } else {
    fused = ag::concat_cols(features);
  }
  out.logits = classify(tape, fused, params.classifier, dropout, mode, rng);
  return out;
}

}  // namespace cfdlab
