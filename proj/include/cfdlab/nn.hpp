// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <vector>

#include "cfdlab/autograd.hpp"

namespace cfdlab {

/// One fully-connected layer: y = x W + b, W is in x out.
struct Linear {
  Linear() = default;
  /// Glorot-uniform weights in +-sqrt(6/(in+out)), zero bias.
  Linear(std::string name, std::size_t in, std::size_t out, std::mt19937_64& rng);

  [[nodiscard]] std::size_t in_features() const { return weight.value.rows(); }
  [[nodiscard]] std::size_t out_features() const { return weight.value.cols(); }
  [[nodiscard]] std::size_t parameter_count() const {
    return weight.value.size() + bias.value.size();
  }

  Var operator()(Tape& tape, Var x) { return ag::linear(x, tape.param(weight), tape.param(bias)); }

  void collect(std::vector<Parameter*>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  Parameter weight;
  Parameter bias;
};

}  // namespace cfdlab
