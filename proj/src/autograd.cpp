// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfdlab/error.hpp"
#include "cfdlab/kernels.hpp"

namespace cfdlab {

Parameter::Parameter(std::string n, Matrix v)
    : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

const Matrix& Var::value() const { return tape_->value(id_); }

Var Tape::constant(Matrix value) {
  if (!value.all_finite()) throw NumericalError("constant: non-finite input");
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Var Tape::param(Parameter& p) {
  Node node;
  node.param = &p;
  node.requires_grad = true;
  if (!p.grad.same_shape(p.value)) p.grad = Matrix(p.value.rows(), p.value.cols());
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Var Tape::record(std::string_view op, Matrix value, std::vector<std::size_t> inputs,
                 BackwardFn fn) {
  if (!value.all_finite()) {
    throw NumericalError(std::string(op) + ": non-finite output (" + value.shape_str() + ")");
  }
  Node node;
  node.value = std::move(value);
  node.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                   [this](std::size_t i) { return nodes_[i].requires_grad; });
  node.inputs = std::move(inputs);
  if (node.requires_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

const Matrix& Tape::value(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.param != nullptr ? n.param->value : n.value;
}

Matrix& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.param != nullptr) return n.param->grad;
  if (n.grad.empty() && !n.value.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.param != nullptr) return n.param->grad;
  if (n.grad.empty()) return Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw TapeError("backward: loss was recorded on another tape");
  if (backward_done_) throw TapeError("backward: tape already differentiated; record a new tape");
  const Matrix& root = value(loss.id());
  if (root.rows() != 1 || root.cols() != 1) {
    throw TapeError("backward: root must be 1x1, got " + root.shape_str());
  }
  backward_done_ = true;
  if (!nodes_[loss.id()].requires_grad) return;
  grad_buffer(loss.id())(0, 0) += 1.0;

  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.backward || n.grad.empty()) continue;
    n.backward(*this, n.value, n.grad);
  }
}

namespace {

std::string shapes(const Matrix& a, const Matrix& b) {
  return a.shape_str() + " and " + b.shape_str();
}

void require_same_shape(std::string_view op, const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeError(std::string(op) + ": shape mismatch " + shapes(a, b));
}

Matrix scalar(double v) { return Matrix(1, 1, v); }

}  // namespace

namespace ag {

Var matmul(Var a, Var b) {
  Tape& t = *a.tape();
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) throw ShapeError("matmul: inner dimensions differ " + shapes(av, bv));
  const std::size_t m = av.rows(), n = bv.cols(), k = av.cols();
  Matrix out(m, n);
  kernels::parallel::gemm_nn(m, n, k, av.data().data(), bv.data().data(), out.data().data());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("matmul", std::move(out), {ia, ib},
                  [ia, ib, m, n, k](Tape& tp, const Matrix&, const Matrix& g) {
                    if (tp.requires_grad(ia)) {
                      // dA += dC * B^T
                      kernels::parallel::gemm_nt_acc(m, k, n, g.data().data(),
                                                     tp.value(ib).data().data(),
                                                     tp.grad_buffer(ia).data().data());
                    }
                    if (tp.requires_grad(ib)) {
                      // dB += A^T * dC
                      kernels::parallel::gemm_tn_acc(k, n, m, tp.value(ia).data().data(),
                                                     g.data().data(),
                                                     tp.grad_buffer(ib).data().data());
                    }
                  });
}

Var linear(Var x, Var weight, Var bias) {
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  const Matrix& wv = weight.value();
  const Matrix& bv = bias.value();
  if (xv.cols() != wv.rows()) throw ShapeError("linear: input vs weight " + shapes(xv, wv));
  if (bv.rows() != 1 || bv.cols() != wv.cols()) {
    throw ShapeError("linear: bias must be 1x" + std::to_string(wv.cols()) + ", got " +
                     bv.shape_str());
  }
  const std::size_t m = xv.rows(), n = wv.cols(), k = xv.cols();
  Matrix out(m, n);
  kernels::parallel::gemm_nn(m, n, k, xv.data().data(), wv.data().data(), out.data().data());
  for (std::size_t r = 0; r < m; ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < n; ++c) row[c] += bv(0, c);
  }
  const std::size_t ix = x.id(), iw = weight.id(), ib = bias.id();
  return t.record("linear", std::move(out), {ix, iw, ib},
                  [ix, iw, ib, m, n, k](Tape& tp, const Matrix&, const Matrix& g) {
                    if (tp.requires_grad(ix)) {
                      kernels::parallel::gemm_nt_acc(m, k, n, g.data().data(),
                                                     tp.value(iw).data().data(),
                                                     tp.grad_buffer(ix).data().data());
                    }
                    if (tp.requires_grad(iw)) {
                      kernels::parallel::gemm_tn_acc(k, n, m, tp.value(ix).data().data(),
                                                     g.data().data(),
                                                     tp.grad_buffer(iw).data().data());
                    }
                    if (tp.requires_grad(ib)) {
                      Matrix& gb = tp.grad_buffer(ib);
                      for (std::size_t r = 0; r < m; ++r)
                        for (std::size_t c = 0; c < n; ++c) gb(0, c) += g(r, c);
                    }
                  });
}

Var add(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  require_same_shape("add", av, bv);
  Matrix out = av;
  out.add_inplace(bv);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record("add", std::move(out), {ia, ib},
                          [ia, ib](Tape& tp, const Matrix&, const Matrix& g) {
                            if (tp.requires_grad(ia)) tp.grad_buffer(ia).add_inplace(g);
                            if (tp.requires_grad(ib)) tp.grad_buffer(ib).add_inplace(g);
                          });
}

Var scale(Var a, double c) {
  Matrix out = a.value();
  for (double& v : out.data()) v *= c;
  const std::size_t ia = a.id();
  return a.tape()->record("scale", std::move(out), {ia},
                          [ia, c](Tape& tp, const Matrix&, const Matrix& g) {
                            auto dst = tp.grad_buffer(ia).data();
                            auto src = g.data();
                            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
                          });
}

Var sum(Var a) {
  const auto d = a.value().data();
  const double s = std::accumulate(d.begin(), d.end(), 0.0);
  const std::size_t ia = a.id();
  return a.tape()->record("sum", scalar(s), {ia}, [ia](Tape& tp, const Matrix&, const Matrix& g) {
    for (double& v : tp.grad_buffer(ia).data()) v += g(0, 0);
  });
}

Var relu(Var x) {
  Matrix out = x.value();
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  const std::size_t ix = x.id();
  return x.tape()->record("relu", std::move(out), {ix},
                          [ix](Tape& tp, const Matrix& y, const Matrix& g) {
                            auto dst = tp.grad_buffer(ix).data();
                            auto yv = y.data();
                            auto gv = g.data();
                            for (std::size_t i = 0; i < dst.size(); ++i)
                              if (yv[i] > 0.0) dst[i] += gv[i];
                          });
}

Var mean(std::span<const Var> xs) {
  if (xs.empty()) throw ValueError("mean: empty list");
  const Matrix& first = xs.front().value();
  Matrix out(first.rows(), first.cols());
  std::vector<std::size_t> ids;
  ids.reserve(xs.size());
  for (const Var& v : xs) {
    require_same_shape("mean", first, v.value());
    out.add_inplace(v.value());
    ids.push_back(v.id());
  }
  const double inv = 1.0 / static_cast<double>(xs.size());
  for (double& v : out.data()) v *= inv;
  auto inputs = ids;
  return xs.front().tape()->record(
      "mean", std::move(out), std::move(inputs),
      [ids = std::move(ids), inv](Tape& tp, const Matrix&, const Matrix& g) {
        for (std::size_t id : ids) {
          if (!tp.requires_grad(id)) continue;
          auto dst = tp.grad_buffer(id).data();
          auto src = g.data();
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += inv * src[i];
        }
      });
}

Var concat_cols(std::span<const Var> xs) {
  if (xs.empty()) throw ValueError("concat_cols: empty list");
  const std::size_t rows = xs.front().rows();
  std::size_t total = 0;
  std::vector<std::size_t> ids, widths;
  for (const Var& v : xs) {
    if (v.rows() != rows) {
      throw ShapeError("concat_cols: row count mismatch " + shapes(xs.front().value(), v.value()));
    }
    total += v.cols();
    ids.push_back(v.id());
    widths.push_back(v.cols());
  }
  Matrix out(rows, total);
  std::size_t offset = 0;
  for (const Var& v : xs) {
    const Matrix& src = v.value();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(src.row(r).data(), src.cols(), out.row(r).data() + offset);
    offset += src.cols();
  }
  auto inputs = ids;
  return xs.front().tape()->record(
      "concat_cols", std::move(out), std::move(inputs),
      [ids = std::move(ids), widths = std::move(widths)](Tape& tp, const Matrix&,
                                                          const Matrix& g) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (tp.requires_grad(ids[i])) {
            Matrix& dst = tp.grad_buffer(ids[i]);
            for (std::size_t r = 0; r < g.rows(); ++r)
              for (std::size_t c = 0; c < widths[i]; ++c) dst(r, c) += g(r, off + c);
          }
          off += widths[i];
        }
      });
}

Var stack_rows(std::span<const Var> xs) {
  if (xs.empty()) throw ValueError("stack_rows: empty list");
  const std::size_t cols = xs.front().cols();
  std::size_t total = 0;
  std::vector<std::size_t> ids, heights;
  for (const Var& v : xs) {
    if (v.cols() != cols) {
      throw ShapeError("stack_rows: column count mismatch " +
                       shapes(xs.front().value(), v.value()));
    }
    total += v.rows();
    ids.push_back(v.id());
    heights.push_back(v.rows());
  }
  std::vector<double> data;
  data.reserve(total * cols);
  for (const Var& v : xs) data.insert(data.end(), v.value().data().begin(), v.value().data().end());
  auto inputs = ids;
  return xs.front().tape()->record(
      "stack_rows", Matrix(total, cols, std::move(data)), std::move(inputs),
      [ids = std::move(ids), heights = std::move(heights), cols](Tape& tp, const Matrix&,
                                                                 const Matrix& g) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
          const std::size_t len = heights[i] * cols;
          if (tp.requires_grad(ids[i])) {
            auto dst = tp.grad_buffer(ids[i]).data();
            for (std::size_t j = 0; j < len; ++j) dst[j] += g.data()[off + j];
          }
          off += len;
        }
      });
}

Var slice_cols(Var x, std::size_t begin, std::size_t end) {
  const Matrix& xv = x.value();
  if (begin >= end || end > xv.cols()) {
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") outside " + xv.shape_str());
  }
  Matrix out(xv.rows(), end - begin);
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t c = begin; c < end; ++c) out(r, c - begin) = xv(r, c);
  const std::size_t ix = x.id();
  return x.tape()->record("slice_cols", std::move(out), {ix},
                          [ix, begin](Tape& tp, const Matrix&, const Matrix& g) {
                            Matrix& dst = tp.grad_buffer(ix);
                            for (std::size_t r = 0; r < g.rows(); ++r)
                              for (std::size_t c = 0; c < g.cols(); ++c)
                                dst(r, begin + c) += g(r, c);
                          });
}

namespace {

// y = softmax over each contiguous block of `width` entries.
Var softmax_blocks(std::string_view op, Var x, std::size_t width) {
  const Matrix& xv = x.value();
  if (!xv.all_finite()) throw NumericalError(std::string(op) + ": non-finite input");
  Matrix out(xv.rows(), xv.cols());
  const std::size_t blocks = xv.size() / width;
  for (std::size_t b = 0; b < blocks; ++b) {
    fn::softmax(xv.data().subspan(b * width, width), out.data().subspan(b * width, width));
  }
  const std::size_t ix = x.id();
  return x.tape()->record(op, std::move(out), {ix},
                          [ix, width, blocks](Tape& tp, const Matrix& y, const Matrix& g) {
                            auto dst = tp.grad_buffer(ix).data();
                            for (std::size_t b = 0; b < blocks; ++b) {
                              const std::size_t o = b * width;
                              double dot = 0.0;
                              for (std::size_t i = 0; i < width; ++i)
                                dot += g.data()[o + i] * y.data()[o + i];
                              for (std::size_t i = 0; i < width; ++i)
                                dst[o + i] += y.data()[o + i] * (g.data()[o + i] - dot);
                            }
                          });
}

}  // namespace

Var softmax(Var v) {
  if (v.cols() != 1 || v.rows() == 0) {
    throw ShapeError("softmax: expects an n x 1 column, got " + v.value().shape_str());
  }
  return softmax_blocks("softmax", v, v.rows());
}

Var softmax_rows(Var x) {
  if (x.cols() == 0) throw ShapeError("softmax_rows: zero-width input");
  return softmax_blocks("softmax_rows", x, x.cols());
}

Var row_dot(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  require_same_shape("row_dot", av, bv);
  Matrix out(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < av.cols(); ++c) s += av(r, c) * bv(r, c);
    out(r, 0) = s;
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record("row_dot", std::move(out), {ia, ib},
                          [ia, ib](Tape& tp, const Matrix&, const Matrix& g) {
                            const Matrix& a_val = tp.value(ia);
                            const Matrix& b_val = tp.value(ib);
                            if (tp.requires_grad(ia)) {
                              Matrix& d = tp.grad_buffer(ia);
                              for (std::size_t r = 0; r < d.rows(); ++r)
                                for (std::size_t c = 0; c < d.cols(); ++c)
                                  d(r, c) += g(r, 0) * b_val(r, c);
                            }
                            if (tp.requires_grad(ib)) {
                              Matrix& d = tp.grad_buffer(ib);
                              for (std::size_t r = 0; r < d.rows(); ++r)
                                for (std::size_t c = 0; c < d.cols(); ++c)
                                  d(r, c) += g(r, 0) * a_val(r, c);
                            }
                          });
}

Var scale_rows(Var x, Var w) {
  const Matrix& xv = x.value();
  const Matrix& wv = w.value();
  if (wv.cols() != 1 || wv.rows() != xv.rows()) {
    throw ShapeError("scale_rows: weights must be " + std::to_string(xv.rows()) + "x1, got " +
                     shapes(xv, wv));
  }
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (double& v : out.row(r)) v *= wv(r, 0);
  const std::size_t ix = x.id(), iw = w.id();
  return x.tape()->record("scale_rows", std::move(out), {ix, iw},
                          [ix, iw](Tape& tp, const Matrix&, const Matrix& g) {
                            const Matrix& x_val = tp.value(ix);
                            const Matrix& w_val = tp.value(iw);
                            if (tp.requires_grad(ix)) {
                              Matrix& d = tp.grad_buffer(ix);
                              for (std::size_t r = 0; r < d.rows(); ++r)
                                for (std::size_t c = 0; c < d.cols(); ++c)
                                  d(r, c) += g(r, c) * w_val(r, 0);
                            }
                            if (tp.requires_grad(iw)) {
                              Matrix& d = tp.grad_buffer(iw);
                              for (std::size_t r = 0; r < x_val.rows(); ++r) {
                                double s = 0.0;
                                for (std::size_t c = 0; c < x_val.cols(); ++c)
                                  s += g(r, c) * x_val(r, c);
                                d(r, 0) += s;
                              }
                            }
                          });
}

Var mse(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  require_same_shape("mse", av, bv);
  if (av.empty()) throw ShapeError("mse: empty operands");
  double s = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av.data()[i] - bv.data()[i];
    s += d * d;
  }
  const double inv_n = 1.0 / static_cast<double>(av.size());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record("mse", scalar(s * inv_n), {ia, ib},
                          [ia, ib, inv_n](Tape& tp, const Matrix&, const Matrix& g) {
                            const auto a_val = tp.value(ia).data();
                            const auto b_val = tp.value(ib).data();
                            const double k = 2.0 * inv_n * g(0, 0);
                            if (tp.requires_grad(ia)) {
                              auto d = tp.grad_buffer(ia).data();
                              for (std::size_t i = 0; i < d.size(); ++i)
                                d[i] += k * (a_val[i] - b_val[i]);
                            }
                            if (tp.requires_grad(ib)) {
                              auto d = tp.grad_buffer(ib).data();
                              for (std::size_t i = 0; i < d.size(); ++i)
                                d[i] -= k * (a_val[i] - b_val[i]);
                            }
                          });
}

Var cosine_similarity(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  require_same_shape("cosine_similarity", av, bv);
  if (av.rows() == 0) throw ShapeError("cosine_similarity: empty operands");
  double total = 0.0;
  for (std::size_t r = 0; r < av.rows(); ++r) total += fn::cosine(av.row(r), bv.row(r));
  const double inv_rows = 1.0 / static_cast<double>(av.rows());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(
      "cosine_similarity", scalar(total * inv_rows), {ia, ib},
      [ia, ib, inv_rows](Tape& tp, const Matrix&, const Matrix& g) {
        const Matrix& a_val = tp.value(ia);
        const Matrix& b_val = tp.value(ib);
        const bool need_a = tp.requires_grad(ia);
        const bool need_b = tp.requires_grad(ib);
        const double scale_all = g(0, 0) * inv_rows;
        for (std::size_t r = 0; r < a_val.rows(); ++r) {
          const auto x = a_val.row(r);
          const auto y = b_val.row(r);
          double dot = 0.0, nx2 = 0.0, ny2 = 0.0;
          for (std::size_t c = 0; c < x.size(); ++c) {
            dot += x[c] * y[c];
            nx2 += x[c] * x[c];
            ny2 += y[c] * y[c];
          }
          const double nx = std::sqrt(nx2), ny = std::sqrt(ny2);
          const double denom = (nx + kCosineEps) * (ny + kCosineEps);
          const double cos = dot / denom;
          // d cos / dx = y/denom - cos * x / (|x| (|x|+eps)); the second term
          // vanishes for a zero row.
          const double kx = nx > 0.0 ? cos / (nx * (nx + kCosineEps)) : 0.0;
          const double ky = ny > 0.0 ? cos / (ny * (ny + kCosineEps)) : 0.0;
          if (need_a) {
            auto d = tp.grad_buffer(ia).row(r);
            for (std::size_t c = 0; c < x.size(); ++c)
              d[c] += scale_all * (y[c] / denom - kx * x[c]);
          }
          if (need_b) {
            auto d = tp.grad_buffer(ib).row(r);
            for (std::size_t c = 0; c < y.size(); ++c)
              d[c] += scale_all * (x[c] / denom - ky * y[c]);
          }
        }
      });
}

Var cross_entropy(Var logits, std::span<const int> labels) {
  const Matrix& lv = logits.value();
  if (labels.size() != lv.rows()) {
    throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                     lv.shape_str() + " logits");
  }
  const int num_cls = static_cast<int>(lv.cols());
  for (int y : labels) {
    if (y < 0 || y >= num_cls) {
      throw ValueError("cross_entropy: label " + std::to_string(y) + " outside [0," +
                       std::to_string(num_cls) + ")");
    }
  }
  Matrix probs(lv.rows(), lv.cols());
  double total = 0.0;
  for (std::size_t r = 0; r < lv.rows(); ++r) {
    const auto row = lv.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (double v : row) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    total += lse - row[static_cast<std::size_t>(labels[r])];
    for (std::size_t c = 0; c < row.size(); ++c) probs(r, c) = std::exp(row[c] - lse);
  }
  const double inv_rows = 1.0 / static_cast<double>(lv.rows());
  std::vector<int> ys(labels.begin(), labels.end());
  const std::size_t il = logits.id();
  return logits.tape()->record(
      "cross_entropy", scalar(total * inv_rows), {il},
      [il, inv_rows, probs = std::move(probs), ys = std::move(ys)](Tape& tp, const Matrix&,
                                                                   const Matrix& g) {
        Matrix& d = tp.grad_buffer(il);
        const double k = g(0, 0) * inv_rows;
        for (std::size_t r = 0; r < probs.rows(); ++r) {
          for (std::size_t c = 0; c < probs.cols(); ++c) d(r, c) += k * probs(r, c);
          d(r, static_cast<std::size_t>(ys[r])) -= k;
        }
      });
}

Var dropout(Var x, double p, Mode mode, std::mt19937_64& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ValueError("dropout: rate must be in [0,1), got " + std::to_string(p));
  if (mode == Mode::kEval || p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  Matrix mask(x.rows(), x.cols());
  for (double& m : mask.data()) m = uniform01(rng) < p ? 0.0 : keep_scale;
  Matrix out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= mask.data()[i];
  const std::size_t ix = x.id();
  return x.tape()->record("dropout", std::move(out), {ix},
                          [ix, mask = std::move(mask)](Tape& tp, const Matrix&, const Matrix& g) {
                            auto d = tp.grad_buffer(ix).data();
                            for (std::size_t i = 0; i < d.size(); ++i)
                              d[i] += g.data()[i] * mask.data()[i];
                          });
}

}  // namespace ag

namespace fn {

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / ((std::sqrt(na) + ag::kCosineEps) * (std::sqrt(nb) + ag::kCosineEps));
}

void softmax(std::span<const double> in, std::span<double> out) {
  const double mx = *std::max_element(in.begin(), in.end());
  double s = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = std::exp(in[i] - mx);
    s += out[i];
  }
  for (double& v : out) v /= s;
}

}  // namespace fn

}  // namespace cfdlab
