// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/config_json.hpp"

#include <set>
#include <string>

#include "cfdlab/error.hpp"

namespace cfdlab {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& section) {
  if (!j.is_object()) throw ConfigError(section + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(section + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(section + "." + key + ": wrong type (" + j.at(key).dump() + ")");
  }
}

template <typename T>
void read_unsigned(const Json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw ConfigError(section + "." + key + ": expected a non-negative integer, got " + v.dump());
  }
  out = v.get<T>();
}

}  // namespace

Json subsets_to_json(const std::vector<Subset>& subsets) {
  Json arr = Json::array();
  for (const Subset& s : subsets) {
    Json members = Json::array();
    for (int i : s.members()) members.push_back(i + 1);
    arr.push_back(members);
  }
  return arr;
}

std::vector<Subset> subsets_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("informative_subsets: expected a list of lists");
  std::vector<Subset> out;
  for (const Json& s : j) {
    if (!s.is_array() || s.empty()) {
      throw ConfigError("informative_subsets: each subset must be a non-empty list");
    }
    std::uint32_t mask = 0;
    std::string text;
    for (const Json& m : s) {
      if (!m.is_number_integer()) throw ConfigError("informative_subsets: members must be integers");
      const auto idx = m.get<long long>();
      text += (text.empty() ? "" : ",") + std::to_string(idx);
      if (idx < 1 || idx > 16) {
        throw ConfigError("informative_subsets: modality " + std::to_string(idx) +
                          " out of range in {" + text + "}");
      }
      mask |= 1u << (idx - 1);
    }
    out.emplace_back(mask);
  }
  return out;
}

Json to_json(const ModelConfig& c) {
  Json j;
  j["num_modalities"] = c.num_modalities;
  j["in_dim"] = c.in_dim;
  j["dim"] = c.dim;
  j["num_cls"] = c.num_cls;
  j["dropout"] = c.dropout;
  j["flags"] = c.flags.to_string();
  return j;
}

Json to_json(const TrainConfig& c) {
  Json j;
  j["base_lr"] = c.base_lr;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["warmup_epochs"] = c.warmup_epochs;
  j["decay_factor"] = c.decay_factor;
  j["decay_every"] = c.decay_every;
  j["weight_decay"] = c.weight_decay;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["per_step_warmup"] = c.per_step_warmup;
  j["seed"] = c.seed;
  return j;
}

Json to_json(const SynthConfig& c) {
  Json j;
  j["num_modalities"] = c.num_modalities;
  j["n"] = c.n;
  j["in_dim"] = c.in_dim;
  j["factor_dim"] = c.factor_dim;
  j["num_cls"] = c.num_cls;
  j["noise_sigma"] = c.noise_sigma;
  j["informative_subsets"] = subsets_to_json(c.informative_subsets);
  j["class_weights"] = c.class_weights;
  j["seed"] = c.seed;
  return j;
}

ModelConfig model_config_from_json(const Json& j) {
  const std::string s = "model";
  check_keys(j, {"num_modalities", "in_dim", "dim", "num_cls", "dropout", "flags"}, s);
  ModelConfig c;
  read(j, "num_modalities", c.num_modalities, s);
  read_unsigned(j, "in_dim", c.in_dim, s);
  read_unsigned(j, "dim", c.dim, s);
  read_unsigned(j, "num_cls", c.num_cls, s);
  read(j, "dropout", c.dropout, s);
  if (j.contains("flags")) {
    std::string flags;
    read(j, "flags", flags, s);
    c.flags = AblationFlags::parse(flags);
  }
  c.validate();
  return c;
}

TrainConfig train_config_from_json(const Json& j) {
  const std::string s = "train";
  check_keys(j,
             {"base_lr", "epochs", "batch_size", "warmup_epochs", "decay_factor", "decay_every",
              "weight_decay", "alpha", "beta", "per_step_warmup", "seed"},
             s);
  TrainConfig c;
  read(j, "base_lr", c.base_lr, s);
  read(j, "epochs", c.epochs, s);
  read_unsigned(j, "batch_size", c.batch_size, s);
  read(j, "warmup_epochs", c.warmup_epochs, s);
  read(j, "decay_factor", c.decay_factor, s);
  read(j, "decay_every", c.decay_every, s);
  read(j, "weight_decay", c.weight_decay, s);
  read(j, "alpha", c.alpha, s);
  read(j, "beta", c.beta, s);
  read(j, "per_step_warmup", c.per_step_warmup, s);
  read_unsigned(j, "seed", c.seed, s);
  c.validate();
  return c;
}

SynthConfig synth_config_from_json(const Json& j) {
  const std::string s = "synth";
  check_keys(j,
             {"num_modalities", "n", "in_dim", "factor_dim", "num_cls", "noise_sigma",
              "informative_subsets", "class_weights", "seed"},
             s);
  SynthConfig c;
  c.informative_subsets = {};
  read(j, "num_modalities", c.num_modalities, s);
  read_unsigned(j, "n", c.n, s);
  read_unsigned(j, "in_dim", c.in_dim, s);
  read_unsigned(j, "factor_dim", c.factor_dim, s);
  read_unsigned(j, "num_cls", c.num_cls, s);
  read(j, "noise_sigma", c.noise_sigma, s);
  if (j.contains("informative_subsets")) {
    c.informative_subsets = subsets_from_json(j.at("informative_subsets"));
  } else {
    c.informative_subsets = {Subset((1u << c.num_modalities) - 1u)};
  }
  read(j, "class_weights", c.class_weights, s);
  read_unsigned(j, "seed", c.seed, s);
  c.validate();
  return c;
}

}  // namespace cfdlab
