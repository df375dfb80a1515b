// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/run_config.hpp"

#include "cfdlab/binary_io.hpp"
#include "cfdlab/dataset_io.hpp"
#include "cfdlab/error.hpp"

namespace cfdlab {

namespace {

void only_keys(const Json& j, std::initializer_list<std::string_view> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto key : keys) known = known || k == key;
    if (!known) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const Json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a path string");
  std::filesystem::path p = v.get<std::string>();
  return p.is_relative() && !base.empty() ? base / p : p;
}

DataSource parse_data(const Json& j, const std::filesystem::path& base) {
  only_keys(j, {"synth", "path", "csv"}, "data");
  if (j.size() != 1) throw ConfigError("data: give exactly one of 'synth', 'path', 'csv'");
  DataSource d;
  if (j.contains("synth")) {
    d.kind = DataSource::Kind::kSynth;
    d.synth = synth_config_from_json(j.at("synth"));
  } else if (j.contains("path")) {
    d.kind = DataSource::Kind::kFile;
    d.path = resolve(base, j.at("path"), "data.path");
  } else {
    const Json& c = j.at("csv");
    only_keys(c, {"modalities", "labels", "num_cls"}, "data.csv");
    d.kind = DataSource::Kind::kCsv;
    if (!c.contains("modalities") || !c.at("modalities").is_array() || c.at("modalities").size() < 2) {
      throw ConfigError("data.csv.modalities: expected a list of at least two files");
    }
    for (const Json& f : c.at("modalities")) d.csv_modalities.push_back(resolve(base, f, "data.csv.modalities"));
    if (!c.contains("labels")) throw ConfigError("data.csv.labels: missing");
    d.csv_labels = resolve(base, c.at("labels"), "data.csv.labels");
    if (c.contains("num_cls")) {
      if (!c.at("num_cls").is_number_unsigned()) throw ConfigError("data.csv.num_cls: expected a non-negative integer");
      d.csv_num_cls = c.at("num_cls").get<std::size_t>();
    }
  }
  return d;
}

}  // namespace

RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir) {
  only_keys(j, {"data", "model", "train", "folds", "out"}, "config");
  RunConfig rc;
  if (j.contains("data")) {
    rc.data = parse_data(j.at("data"), base_dir);
  } else {
    rc.data.synth.informative_subsets = {Subset((1u << rc.data.synth.num_modalities) - 1u)};
  }
  if (j.contains("model")) {
    rc.model_json = j.at("model");
    // Validate everything but the data-dependent shape now.
    model_config_from_json(rc.model_json);
  }
  if (j.contains("train")) rc.train = train_config_from_json(j.at("train"));
  if (j.contains("folds")) {
    if (!j.at("folds").is_number_unsigned()) throw ConfigError("folds: expected an integer >= 2");
    rc.folds = j.at("folds").get<std::size_t>();
  }
  if (rc.folds < 2) throw ConfigError("folds: expected an integer >= 2");
  if (j.contains("out")) rc.out = resolve(base_dir, j.at("out"), "out");
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = bin::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

void apply_overrides(RunConfig& rc, const Overrides& o) {
  if (o.seed) {
    rc.train.seed = *o.seed;
    rc.data.synth.seed = *o.seed;
  }
  if (o.out) rc.out = *o.out;
  if (o.folds) {
    if (*o.folds < 2) throw ConfigError("--folds: expected an integer >= 2");
    rc.folds = *o.folds;
  }
  if (o.flags) {
    rc.model_json["flags"] = AblationFlags::parse(*o.flags).to_string();
    model_config_from_json(rc.model_json);
  }
}

Dataset load_data(const DataSource& src) {
  switch (src.kind) {
    case DataSource::Kind::kSynth:
      return generate(src.synth);
    case DataSource::Kind::kFile:
      return load_dataset(src.path);
    case DataSource::Kind::kCsv:
      return load_dataset_csv(src.csv_modalities, src.csv_labels, src.csv_num_cls);
  }
  throw ConfigError("data: unknown source");
}

ModelConfig resolve_model(const RunConfig& rc, const Dataset& data) {
  Json j = rc.model_json;
  auto fill = [&](const char* key, const Json& actual) {
    if (!j.contains(key)) {
      j[key] = actual;
    } else if (j.at(key) != actual) {
      throw ConfigError("model." + std::string(key) + " is " + j.at(key).dump() +
                        " but the data has " + actual.dump());
    }
  };
  fill("num_modalities", data.num_modalities());
  fill("in_dim", data.in_dim());
  fill("num_cls", data.num_cls);
  return model_config_from_json(j);
}

Json to_json(const RunConfig& rc) {
  Json j;
  Json data;
  switch (rc.data.kind) {
    case DataSource::Kind::kSynth:
      data["synth"] = to_json(rc.data.synth);
      break;
    case DataSource::Kind::kFile:
      data["path"] = rc.data.path.string();
      break;
    case DataSource::Kind::kCsv: {
      Json c;
      Json files = Json::array();
      for (const auto& p : rc.data.csv_modalities) files.push_back(p.string());
      c["modalities"] = files;
      c["labels"] = rc.data.csv_labels.string();
      c["num_cls"] = rc.data.csv_num_cls;
      data["csv"] = c;
      break;
    }
  }
  j["data"] = data;
  j["model"] = rc.model_json;
  j["train"] = to_json(rc.train);
  j["folds"] = rc.folds;
  j["out"] = rc.out.string();
  return j;
}

}  // namespace cfdlab
