// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/nn.hpp"

#include <cmath>

namespace cfdlab {

Linear::Linear(std::string name, std::size_t in, std::size_t out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  Matrix w(in, out);
  for (double& v : w.data()) v = (2.0 * uniform01(rng) - 1.0) * limit;
  weight = Parameter(name + ".weight", std::move(w));
  bias = Parameter(name + ".bias", Matrix(1, out));
}

}  // namespace cfdlab
