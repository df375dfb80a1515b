// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "cfdlab/model.hpp"
#include "cfdlab/synthdata.hpp"
#include "cfdlab/train.hpp"

namespace cfdlab {

// JSON mapping of the configuration structs. Readers start from the
// defaults, reject unknown keys and wrong types with ConfigError, and
// validate the result. Subsets are written as 1-based member lists, e.g.
// [[1,2]].

using Json = nlohmann::ordered_json;

Json to_json(const ModelConfig& c);
Json to_json(const TrainConfig& c);
Json to_json(const SynthConfig& c);

ModelConfig model_config_from_json(const Json& j);
TrainConfig train_config_from_json(const Json& j);
SynthConfig synth_config_from_json(const Json& j);

Json subsets_to_json(const std::vector<Subset>& subsets);
std::vector<Subset> subsets_from_json(const Json& j);

}  // namespace cfdlab
