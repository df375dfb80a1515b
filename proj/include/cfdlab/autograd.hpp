// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfdlab/matrix.hpp"

namespace cfdlab {

/// A trainable matrix with a persistent gradient buffer. Gradients from
/// successive backward passes add up until zero_grad() is called.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Matrix value);

  void zero_grad() { grad.fill(0.0); }

  std::string name;
  Matrix value;
  Matrix grad;
};

enum class Mode { kTrain, kEval };

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  [[nodiscard]] const Matrix& value() const;
  [[nodiscard]] std::size_t rows() const { return value().rows(); }
  [[nodiscard]] std::size_t cols() const { return value().cols(); }
  [[nodiscard]] std::size_t id() const noexcept { return id_; }
  [[nodiscard]] Tape* tape() const noexcept { return tape_; }
  [[nodiscard]] bool valid() const noexcept { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode recording of matrix operations.
///
/// Nodes are appended in evaluation order, so the node list is already a
/// topological order and backward() is a single reverse sweep. Parameters are
/// referenced, not copied: their values must stay untouched while the tape is
/// alive, and their gradients land directly in Parameter::grad.
class Tape {
 public:
  /// (tape, output value, gradient w.r.t. output). Accumulates into inputs.
  using BackwardFn = std::function<void(Tape&, const Matrix&, const Matrix&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var param(Parameter& p);

  /// Appends an op result. Throws NumericalError if `value` holds NaN/Inf.
  Var record(std::string_view op, Matrix value, std::vector<std::size_t> inputs, BackwardFn fn);

  /// Seeds d(loss)/d(loss) = 1 and sweeps the tape once. A tape can be
  /// differentiated only once; the root must be 1x1.
  void backward(Var loss);

  [[nodiscard]] const Matrix& value(std::size_t id) const;
  [[nodiscard]] bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  /// Gradient buffer of a node, allocated as zeros on first use. For
  /// parameter leaves this is the Parameter's own grad.
  Matrix& grad_buffer(std::size_t id);
  /// Gradient reached by a node after backward (zeros if none flowed).
  [[nodiscard]] Matrix grad(Var v) const;
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Parameter* param = nullptr;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

/// Uniform double in [0,1) built from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Differentiable operations. Shape errors throw ShapeError naming both shapes.
namespace ag {

Var matmul(Var a, Var b);
/// x(batch,in) * W(in,out) + b(1,out) broadcast over rows.
Var linear(Var x, Var weight, Var bias);
Var add(Var a, Var b);
Var scale(Var a, double c);
/// Sum of all entries, 1x1.
Var sum(Var a);
Var relu(Var x);
/// Elementwise average of equally shaped matrices.
Var mean(std::span<const Var> xs);
Var concat_cols(std::span<const Var> xs);
Var stack_rows(std::span<const Var> xs);
/// Columns [begin, end).
Var slice_cols(Var x, std::size_t begin, std::size_t end);
/// Softmax of an n x 1 column vector.
Var softmax(Var v);
/// Softmax applied to every row independently.
Var softmax_rows(Var x);
/// Per-row dot product of equally shaped matrices, batch x 1.
Var row_dot(Var a, Var b);
/// Scales row r of x by w(r,0); w is batch x 1.
Var scale_rows(Var x, Var w);
/// Mean of squared differences over all entries, 1x1.
Var mse(Var a, Var b);
/// Mean over rows of the per-row cosine similarity (norm guard 1e-8), 1x1.
Var cosine_similarity(Var a, Var b);
/// Mean negative log-likelihood of `labels` under softmax(logits), 1x1.
Var cross_entropy(Var logits, std::span<const int> labels);
/// Inverted dropout: identity in eval mode or when p == 0.
Var dropout(Var x, double p, Mode mode, std::mt19937_64& rng);

inline constexpr double kCosineEps = 1e-8;

}  // namespace ag

/// Forward-only helpers shared with metrics/exports.
namespace fn {
/// Per-row cosine similarity with the same norm guard as ag::cosine_similarity.
double cosine(std::span<const double> a, std::span<const double> b);
/// Stable softmax of one contiguous vector, written to `out`.
void softmax(std::span<const double> in, std::span<double> out);
}  // namespace fn

}  // namespace cfdlab
