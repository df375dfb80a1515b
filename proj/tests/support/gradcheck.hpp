// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cfdlab/autograd.hpp"

namespace cfdlab::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdTolerance = 1e-4;
/// Central differences at h and h/2 that disagree by more than this
/// (relative, floor 1) mean the stencil straddles a ReLU kink.
inline constexpr double kKinkTolerance = 1e-6;
/// Redraws allowed per case before kink rejection counts as a failure.
inline constexpr int kMaxKinkRedraws = 20;

struct GradCheck {
  double rel_error = 0;   ///< |g_tape - g_fd| / max(|g_tape|, |g_fd|), over all elements
  double analytic_norm = 0;
  std::size_t elements = 0;
  /// Elements whose stencil is not smooth; the instance tests nothing there.
  std::size_t kinks = 0;
};

/// Central differences of `loss` w.r.t. every element of `params`, compared
/// with the tape gradient. `loss` must rebuild its graph on the given tape
/// and be deterministic.
GradCheck gradcheck(std::span<Parameter* const> params, const std::function<Var(Tape&)>& loss,
                    double h = kFdStep);

/// One randomized gradient-check instance per call.
struct GradCase {
  std::string name;
  std::function<GradCheck(std::mt19937_64&)> run;
};

struct CaseReport {
  int checked = 0;   ///< kink-free instances compared
  int rejected = 0;  ///< instances redrawn because of a kink
  int failures = 0;  ///< checked instances over kFdTolerance
  double worst = 0;
};

/// Draws instances until `instances` kink-free ones have been checked, or
/// kMaxKinkRedraws rejections have happened.
CaseReport run_case(const GradCase& c, std::mt19937_64& rng, int instances);

/// Every differentiable op, the CFD/DMF building blocks and the full
/// composite objective.
std::vector<GradCase> gradient_cases();

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0);

}  // namespace cfdlab::testing
