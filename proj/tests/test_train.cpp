// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "cfdlab/binary_io.hpp"
#include "cfdlab/checkpoint.hpp"
#include "cfdlab/error.hpp"
#include "cfdlab/kfold.hpp"
#include "cfdlab/train.hpp"

using namespace cfdlab;
namespace fs = std::filesystem;

namespace {

Dataset toy(int m, std::size_t n, double sigma, std::uint64_t seed, std::size_t in_dim = 12) {
  SynthConfig c;
  c.num_modalities = m;
  c.n = n;
  c.in_dim = in_dim;
  c.factor_dim = 3;
  c.noise_sigma = sigma;
  c.informative_subsets = {Subset((1u << m) - 1u)};
  c.seed = seed;
  return generate(c);
}

ModelConfig small_model(int m, std::size_t in_dim = 12) {
  ModelConfig mc;
  mc.num_modalities = m;
  mc.in_dim = in_dim;
  mc.dim = 8;
  return mc;
}

TrainConfig short_run(int epochs) {
  TrainConfig tc;
  tc.epochs = epochs;
  tc.base_lr = 5e-3;
  tc.warmup_epochs = 1;
  tc.seed = 42;
  return tc;
}

bool same_values(const std::vector<Parameter>& a, const std::vector<Parameter>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i].value == b[i].value)) return false;
  return true;
}

// Two classes around well separated centers in every modality.
Dataset margin_toy(std::size_t n, std::size_t in_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Dataset d;
  d.num_cls = 2;
  for (std::size_t i = 0; i < n; ++i) d.labels.push_back(static_cast<int>(i % 2));
  for (int j = 0; j < 2; ++j) {
    Matrix center(2, in_dim);
    for (double& v : center.data()) v = nd(rng);
    Matrix x(n, in_dim);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < in_dim; ++c)
        x(i, c) = center(static_cast<std::size_t>(d.labels[i]), c) + 0.1 * nd(rng);
    d.modalities.push_back(std::move(x));
  }
  return d;
}

}  // namespace

TEST_CASE("lr schedule: warmup then stepped decay", "[train][lr]") {
  TrainConfig c;
  c.base_lr = 8e-4;
  c.epochs = 50;
  CHECK(lr_at(0, c) == 1.6e-4);
  CHECK(lr_at(4, c) == 8e-4);
  CHECK(lr_at(5, c) == 6.4e-4);
  for (int e = 1; e < 5; ++e) CHECK(lr_at(e, c) > lr_at(e - 1, c));
  for (int e = 6; e < 50; ++e) CHECK(lr_at(e, c) <= lr_at(e - 1, c));
  CHECK(lr_at(9, c) == lr_at(5, c));
  CHECK(lr_at(10, c) < lr_at(9, c));
  CHECK_THROWS_AS(lr_at(-1, c), ValueError);
  CHECK_THROWS_AS(lr_at(50, c), ValueError);

  TrainConfig step = c;
  step.per_step_warmup = true;
  CHECK(lr_at_step(0, 9, 10, step) == Catch::Approx(1.6e-4));
  CHECK(lr_at_step(0, 0, 10, step) == Catch::Approx(1.6e-5));
  CHECK(lr_at_step(0, 0, 10, c) == lr_at(0, c));
  CHECK(lr_at_step(7, 3, 10, step) == lr_at(7, step));
}

TEST_CASE("train config validation", "[train]") {
  TrainConfig c;
  c.warmup_epochs = 60;
  c.epochs = 50;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainConfig{};
  c.base_lr = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainConfig{};
  c.alpha = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("adam: single scalar step matches the hand computation", "[train][adam]") {
  Parameter p("theta", Matrix{{1.0}});
  p.grad = Matrix{{0.3}};
  AdamState st;
  Parameter* ps[] = {&p};
  adam_step(ps, st, 0.01, 0.0);
  // m = 0.03, v = 9e-5; bias-corrected m_hat = 0.3, v_hat = 0.09.
  const double m_hat = (0.1 * 0.3) / (1 - 0.9);
  const double v_hat = (0.001 * 0.09) / (1 - 0.999);
  CHECK(p.value(0, 0) == Catch::Approx(1.0 - 0.01 * m_hat / (std::sqrt(v_hat) + 1e-8)).epsilon(1e-14));
  CHECK(p.value(0, 0) == Catch::Approx(1.0 - 0.01).epsilon(1e-7));  // ~ theta - lr * sign(g)
  CHECK(st.step == 1);
}

TEST_CASE("adam: zero gradient is a fixed point, pure decay shrinks", "[train][adam]") {
  Parameter p("w", Matrix{{2.0, -3.0}});
  AdamState st;
  Parameter* ps[] = {&p};
  for (int i = 0; i < 5; ++i) adam_step(ps, st, 0.1, 0.0);
  CHECK(p.value == Matrix{{2.0, -3.0}});

  Parameter q("w", Matrix{{2.0, -3.0}});
  AdamState sq;
  Parameter* qs[] = {&q};
  double prev0 = 2.0, prev1 = 3.0;
  for (int i = 0; i < 20; ++i) {
    adam_step(qs, sq, 0.05, 0.1);
    CHECK(std::fabs(q.value(0, 0)) < prev0);
    CHECK(std::fabs(q.value(0, 1)) < prev1);
    prev0 = std::fabs(q.value(0, 0));
    prev1 = std::fabs(q.value(0, 1));
  }
  CHECK(sq.step == 20);

  Parameter r("r", Matrix{{1.0}});
  r.grad = Matrix();
  Parameter* rs[] = {&r};
  AdamState sr;
  CHECK_THROWS_AS(adam_step(rs, sr, 0.1, 0.0), ValueError);
}

TEST_CASE("epoch shuffles are permutations", "[train][property]") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 2u, 17u, 100u}) {
    for (int e = 0; e < 5; ++e) {
      auto order = shuffled_indices(n, rng);
      std::sort(order.begin(), order.end());
      for (std::size_t i = 0; i < n; ++i) CHECK(order[i] == i);
    }
  }
}

TEST_CASE("full-batch loss falls on a fixed toy problem", "[train]") {
  const Dataset d = toy(3, 64, 0.1, 3);
  ModelConfig mc = small_model(3);
  mc.dropout = 0.0;
  CfdModel model(mc, 1);
  AdamState st;
  std::mt19937_64 rng(0);
  const auto params = model.parameters();
  double first = 0, last = 0;
  for (int step = 0; step < 50; ++step) {
    Tape tape;
    const ForwardResult fwd = model.forward(tape, d.modalities, Mode::kTrain, rng);
    const Var cls = ag::cross_entropy(fwd.logits, d.labels);
    const Var loss = total_loss(cls, model.disentangle_losses(tape, fwd, 1.0, 1.0), 1.0, 1.0);
    const double v = loss.value()(0, 0);
    if (step == 0) first = v;
    last = v;
    model.zero_grad();
    tape.backward(loss);
    adam_step(params, st, 1e-3, 0.0);
  }
  CHECK(last < first - 0.1 * std::fabs(first));
}

TEST_CASE("separable two-modality data is learned within 30 epochs", "[train]") {
  const Dataset d = margin_toy(120, 12, 5);
  const auto folds = kfold_split(d.labels, 3, 0);
  const Dataset tr = d.subset(folds[0].train), va = d.subset(folds[0].val);
  const FitResult fr = fit(tr, va, small_model(2), short_run(30));
  double best = 0;
  for (const auto& e : fr.history.epochs) best = std::max(best, e.val.get("ACC"));
  CHECK(best == 1.0);
}

TEST_CASE("fit is deterministic and records the loss components", "[train]") {
  const Dataset d = toy(3, 90, 0.2, 6);
  const auto folds = kfold_split(d.labels, 3, 0);
  const Dataset tr = d.subset(folds[0].train), va = d.subset(folds[0].val);
  const FitResult a = fit(tr, va, small_model(3), short_run(4));
  const FitResult b = fit(tr, va, small_model(3), short_run(4));
  CHECK(a.history == b.history);
  CHECK(a.final_state == b.final_state);
  CHECK(a.history.epochs.size() == 4);
  CHECK(a.history.epochs[0].loss_sh > 0.0);
  CHECK(a.history.to_csv().rfind("epoch,lr,train_loss,loss_cls,loss_sh,loss_ps,loss_diff,val_SEN", 0) == 0);
  CHECK(History::from_json(a.history.to_json()) == a.history);

  TrainConfig plain = short_run(3);
  plain.alpha = 0;
  plain.beta = 0;
  const FitResult c = fit(tr, va, small_model(3), plain);
  for (const auto& e : c.history.epochs) {
    CHECK(e.loss_sh == 0.0);
    CHECK(e.loss_ps == 0.0);
    CHECK(e.loss_diff == 0.0);
    CHECK(e.train_loss == e.loss_cls);
  }
}

TEST_CASE("divergence names the epoch and batch", "[train]") {
  Dataset d = toy(2, 30, 0.0, 7);
  for (Matrix& x : d.modalities)
    for (double& v : x.data()) v *= 1e200;
  try {
    fit(d, d, small_model(2), short_run(2));
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("epoch 0, batch 0") != std::string::npos);
  }
}

TEST_CASE("checkpoints round-trip bitwise and detect tampering", "[train][checkpoint]") {
  const Dataset d = toy(3, 60, 0.2, 8);
  const auto folds = kfold_split(d.labels, 3, 0);
  const FitResult fr = fit(d.subset(folds[0].train), d.subset(folds[0].val), small_model(3), short_run(2));
  const std::string bytes = encode_checkpoint(fr.final_state);
  CHECK(decode_checkpoint(bytes) == fr.final_state);

  const fs::path path = fs::temp_directory_path() / "cfdlab_ckpt_test.cfdc";
  save_checkpoint(fr.final_state, path);
  CHECK(load_checkpoint(path) == fr.final_state);
  CHECK(bin::read_file(path) == bytes);

  auto kind_of = [](const std::string& b) {
    try {
      decode_checkpoint(b);
    } catch (const FormatError& e) {
      return e.kind();
    }
    FAIL("corrupt checkpoint accepted");
    return FormatError::Kind::kMalformed;
  };
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x01;
  CHECK(kind_of(flipped) == FormatError::Kind::kChecksum);
  std::string magic = bytes;
  magic[1] = 'X';
  CHECK(kind_of(magic) == FormatError::Kind::kBadMagic);
  CHECK(kind_of(bytes.substr(0, 7)) == FormatError::Kind::kTruncated);

  CfdModel m = fr.final_state.make_model();
  std::vector<Parameter> values;
  for (const Parameter* p : m.parameters()) values.emplace_back(p->name, p->value);
  CHECK(same_values(values, fr.final_state.params));
}

TEST_CASE("resuming reproduces the uninterrupted run exactly", "[train][checkpoint]") {
  const Dataset d = toy(3, 90, 0.3, 9);
  const auto folds = kfold_split(d.labels, 3, 1);
  const Dataset tr = d.subset(folds[1].train), va = d.subset(folds[1].val);
  const ModelConfig mc = small_model(3);
  const TrainConfig tc = short_run(6);

  const FitResult straight = fit(tr, va, mc, tc);

  FitOptions first;
  first.stop_after = 3;
  const FitResult partial = fit(tr, va, mc, tc, first);
  CHECK(partial.final_state.epochs_done == 3);
  const Checkpoint saved = decode_checkpoint(encode_checkpoint(partial.final_state));

  FitOptions rest;
  rest.resume = &saved;
  const FitResult resumed = fit(tr, va, mc, tc, rest);
  CHECK(resumed.final_state == straight.final_state);
  CHECK(resumed.best_state == straight.best_state);
  CHECK(resumed.history == straight.history);

  TrainConfig other = tc;
  other.base_lr *= 2;
  try {
    fit(tr, va, mc, other, rest);
    FAIL("expected a config mismatch");
  } catch (const FormatError& e) {
    CHECK(e.kind() == FormatError::Kind::kConfigMismatch);
  }
  CHECK_THROWS_AS(require_config(saved, mc, other), FormatError);
}
