// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/train.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cfdlab/binary_io.hpp"
#include "cfdlab/config_json.hpp"
#include "cfdlab/csv.hpp"
#include "cfdlab/error.hpp"

namespace cfdlab {

void TrainConfig::validate() const {
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw ConfigError("train: base_lr must be positive");
  if (epochs <= 0) throw ConfigError("train: epochs must be positive");
  if (batch_size == 0) throw ConfigError("train: batch_size must be positive");
  if (warmup_epochs < 0 || warmup_epochs > epochs) {
    throw ConfigError("train: warmup_epochs must be in [0, epochs]");
  }
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) {
    throw ConfigError("train: decay_factor must be in (0,1]");
  }
  if (decay_every <= 0) throw ConfigError("train: decay_every must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("train: weight_decay must be >= 0");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("train: alpha and beta must be >= 0");
}

double lr_at(int epoch, const TrainConfig& c) {
  if (epoch < 0 || epoch >= c.epochs) {
    throw ValueError("lr_at: epoch " + std::to_string(epoch) + " outside [0," +
                     std::to_string(c.epochs) + ")");
  }
  if (epoch < c.warmup_epochs) {
    return c.base_lr * (static_cast<double>(epoch + 1) / c.warmup_epochs);
  }
  const int decays = 1 + (epoch - c.warmup_epochs) / c.decay_every;
  return c.base_lr * std::pow(c.decay_factor, decays);
}

double lr_at_step(int epoch, std::size_t step, std::size_t steps_per_epoch, const TrainConfig& c) {
  if (steps_per_epoch == 0 || step >= steps_per_epoch) {
    throw ValueError("lr_at_step: step out of range");
  }
  if (!c.per_step_warmup || epoch >= c.warmup_epochs) return lr_at(epoch, c);
  if (epoch < 0) return lr_at(epoch, c);  // throws
  const double progress = epoch + static_cast<double>(step + 1) / static_cast<double>(steps_per_epoch);
  return c.base_lr * progress / c.warmup_epochs;
}

void adam_step(std::span<Parameter* const> params, AdamState& state, double lr,
               double weight_decay) {
  if (state.m.empty()) {
    for (const Parameter* p : params) {
      state.m.emplace_back(p->value.rows(), p->value.cols());
      state.v.emplace_back(p->value.rows(), p->value.cols());
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adam_step: state holds " + std::to_string(state.m.size()) +
                     " moments for " + std::to_string(params.size()) + " parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(AdamState::kBeta1, t);
  const double c2 = 1.0 - std::pow(AdamState::kBeta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (!p.grad.same_shape(p.value)) {
      throw ValueError("adam_step: missing gradient for " + p.name);
    }
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    if (!m.same_shape(p.value) || !v.same_shape(p.value)) {
      throw ShapeError("adam_step: moment shape mismatch for " + p.name);
    }
    auto theta = p.value.data();
    auto grad = p.grad.data();
    auto md = m.data();
    auto vd = v.data();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double g = grad[k] + weight_decay * theta[k];
      md[k] = AdamState::kBeta1 * md[k] + (1.0 - AdamState::kBeta1) * g;
      vd[k] = AdamState::kBeta2 * vd[k] + (1.0 - AdamState::kBeta2) * g * g;
      const double mhat = md[k] / c1;
      const double vhat = vd[k] / c2;
      theta[k] -= lr * mhat / (std::sqrt(vhat) + AdamState::kEps);
    }
  }
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  return order;
}

// History ------------------------------------------------------------------

std::string History::to_csv() const {
  std::vector<std::string> header{"epoch", "lr", "train_loss", "loss_cls", "loss_sh", "loss_ps",
                                  "loss_diff"};
  if (!epochs.empty()) {
    for (const auto& kv : epochs.front().val.values) header.push_back("val_" + kv.first);
  }
  csv::Writer w(header);
  for (const EpochRecord& r : epochs) {
    std::vector<double> vals{r.lr, r.train_loss, r.loss_cls, r.loss_sh, r.loss_ps, r.loss_diff};
    for (const auto& kv : r.val.values) vals.push_back(kv.second);
    w.row(std::to_string(r.epoch), vals);
  }
  return w.str();
}

std::string History::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const EpochRecord& r : epochs) {
    nlohmann::ordered_json j;
    j["epoch"] = r.epoch;
    j["lr"] = r.lr;
    j["train_loss"] = r.train_loss;
    j["loss_cls"] = r.loss_cls;
    j["loss_sh"] = r.loss_sh;
    j["loss_ps"] = r.loss_ps;
    j["loss_diff"] = r.loss_diff;
    j["val"] = nlohmann::ordered_json::parse(r.val.to_json());
    arr.push_back(std::move(j));
  }
  return arr.dump();
}

History History::from_json(const std::string& text) {
  History h;
  const auto arr = nlohmann::ordered_json::parse(text);
  for (const auto& j : arr) {
    EpochRecord r;
    r.epoch = j.at("epoch").get<int>();
    r.lr = j.at("lr").get<double>();
    r.train_loss = j.at("train_loss").get<double>();
    r.loss_cls = j.at("loss_cls").get<double>();
    r.loss_sh = j.at("loss_sh").get<double>();
    r.loss_ps = j.at("loss_ps").get<double>();
    r.loss_diff = j.at("loss_diff").get<double>();
    r.val = MetricsReport::from_json(j.at("val").dump());
    h.epochs.push_back(std::move(r));
  }
  return h;
}

// Checkpoint ---------------------------------------------------------------

namespace {

bool same_params(const std::vector<Parameter>& a, const std::vector<Parameter>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !(a[i].value == b[i].value)) return false;
  }
  return true;
}

std::vector<Parameter> snapshot(CfdModel& model) {
  std::vector<Parameter> out;
  for (const Parameter* p : model.parameters()) out.emplace_back(p->name, p->value);
  return out;
}

void load_into(CfdModel& model, const std::vector<Parameter>& values) {
  auto params = model.parameters();
  if (params.size() != values.size()) {
    throw FormatError(FormatError::Kind::kConfigMismatch,
                      "checkpoint holds " + std::to_string(values.size()) +
                          " parameters, model has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->name != values[i].name || !params[i]->value.same_shape(values[i].value)) {
      throw FormatError(FormatError::Kind::kConfigMismatch,
                        "parameter " + std::to_string(i) + " is " + values[i].name + " " +
                            values[i].value.shape_str() + ", model expects " + params[i]->name +
                            " " + params[i]->value.shape_str());
    }
    params[i]->value = values[i].value;
  }
}

std::string rng_to_string(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

std::mt19937_64 rng_from_string(const std::string& s) {
  std::mt19937_64 rng;
  std::istringstream is(s);
  is >> rng;
  if (!is) throw FormatError(FormatError::Kind::kMalformed, "checkpoint: bad rng state");
  return rng;
}

}  // namespace

bool operator==(const Checkpoint& a, const Checkpoint& b) {
  return a.model == b.model && a.train == b.train && same_params(a.params, b.params) &&
         same_params(a.best_params, b.best_params) && a.adam == b.adam &&
         a.epochs_done == b.epochs_done && a.rng_state == b.rng_state &&
         a.best_val_auc == b.best_val_auc && a.best_epoch == b.best_epoch &&
         a.history == b.history;
}

CfdModel Checkpoint::make_model(bool use_best) const {
  CfdModel m(model, train.seed);
  const auto& src = use_best && !best_params.empty() ? best_params : params;
  load_into(m, src);
  return m;
}

std::uint64_t config_hash(const ModelConfig& model, const TrainConfig& train) {
  Json j;
  j["model"] = to_json(model);
  j["train"] = to_json(train);
  return bin::crc32(j.dump());
}

// Prediction ---------------------------------------------------------------

namespace {

std::vector<Matrix> gather(const Dataset& d, std::span<const std::size_t> idx) {
  std::vector<Matrix> out;
  out.reserve(d.modalities.size());
  for (const Matrix& m : d.modalities) out.push_back(m.gather_rows(idx));
  return out;
}

void check_compatible(const CfdModel& model, const Dataset& d) {
  const ModelConfig& c = model.config();
  if (d.num_modalities() != c.num_modalities || d.in_dim() != c.in_dim) {
    throw ShapeError("dataset has M=" + std::to_string(d.num_modalities()) +
                     ", in_dim=" + std::to_string(d.in_dim()) + " but model expects M=" +
                     std::to_string(c.num_modalities) + ", in_dim=" + std::to_string(c.in_dim));
  }
  if (d.num_cls != c.num_cls) {
    throw ShapeError("dataset has " + std::to_string(d.num_cls) + " classes, model expects " +
                     std::to_string(c.num_cls));
  }
}

}  // namespace

Prediction predict(CfdModel& model, const Dataset& data, std::size_t batch_size) {
  check_compatible(model, data);
  if (batch_size == 0) throw ValueError("predict: batch_size must be positive");
  const std::size_t n = data.size();
  const std::size_t k = model.lattice().final_count();
  Prediction out;
  out.probs = Matrix(n, model.config().num_cls);
  if (model.config().flags.moe) out.gates = Matrix(n, k);
  std::mt19937_64 unused(0);
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const auto inputs = gather(data, idx);
    Tape tape;
    const ForwardResult fwd = model.forward(tape, inputs, Mode::kEval, unused);
    const Matrix& logits = fwd.logits.value();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      fn::softmax(logits.row(r), out.probs.row(start + r));
    }
    if (fwd.trace) {
      const Matrix& omega = fwd.trace->omega.value();
      for (std::size_t r = 0; r < idx.size(); ++r) {
        std::copy(omega.row(r).begin(), omega.row(r).end(), out.gates.row(start + r).begin());
      }
    }
  }
  return out;
}

MetricsReport evaluate(CfdModel& model, const Dataset& data, std::size_t batch_size) {
  const Prediction p = predict(model, data, batch_size);
  return evaluate_predictions(p.probs, data.labels);
}

// Training loop ------------------------------------------------------------

FitResult fit(const Dataset& train, const Dataset& val, const ModelConfig& model_config,
              const TrainConfig& train_config, const FitOptions& options) {
  model_config.validate();
  train_config.validate();
  train.validate();
  val.validate();
  if (train.size() == 0 || val.size() == 0) throw ValueError("fit: empty train or val split");

  Checkpoint state;
  state.model = model_config;
  state.train = train_config;
  CfdModel model(model_config, train_config.seed);
  check_compatible(model, train);
  check_compatible(model, val);
  std::mt19937_64 rng(train_config.seed + 1);

  if (options.resume != nullptr) {
    const Checkpoint& r = *options.resume;
    if (config_hash(r.model, r.train) != config_hash(model_config, train_config)) {
      throw FormatError(FormatError::Kind::kConfigMismatch,
                        "resume: checkpoint config hash differs from the requested run");
    }
    load_into(model, r.params);
    state.best_params = r.best_params;
    state.adam = r.adam;
    state.epochs_done = r.epochs_done;
    state.best_val_auc = r.best_val_auc;
    state.best_epoch = r.best_epoch;
    state.history = r.history;
    rng = rng_from_string(r.rng_state);
  }

  const auto params = model.parameters();
  const std::size_t n = train.size();
  const std::size_t steps = (n + train_config.batch_size - 1) / train_config.batch_size;
  std::vector<std::size_t> order;
  std::vector<int> labels;

  for (int epoch = state.epochs_done; epoch < train_config.epochs; ++epoch) {
    if (options.stop_after >= 0 && epoch >= options.stop_after) break;

    order = shuffled_indices(n, rng);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr_at(epoch, train_config);
    for (std::size_t step = 0; step < steps; ++step) {
      const std::size_t begin = step * train_config.batch_size;
      const std::size_t end = std::min(n, begin + train_config.batch_size);
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      const auto inputs = gather(train, idx);
      labels.clear();
      for (std::size_t i : idx) labels.push_back(train.labels[i]);

      const double lr = lr_at_step(epoch, step, steps, train_config);
      double l_total = 0, l_cls = 0, l_sh = 0, l_ps = 0, l_diff = 0;
      try {
        Tape tape;
        const ForwardResult fwd = model.forward(tape, inputs, Mode::kTrain, rng);
        const Var cls = ag::cross_entropy(fwd.logits, labels);
        const LossTerms terms =
            model.disentangle_losses(tape, fwd, train_config.alpha, train_config.beta);
        const Var total = total_loss(cls, terms, train_config.alpha, train_config.beta);
        l_total = total.value()(0, 0);
        l_cls = cls.value()(0, 0);
        if (terms.shared.valid()) l_sh = terms.shared.value()(0, 0);
        if (terms.partial.valid()) l_ps = terms.partial.value()(0, 0);
        if (terms.diff.valid()) l_diff = terms.diff.value()(0, 0);
        model.zero_grad();
        tape.backward(total);
      } catch (const NumericalError& e) {
        throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(step) + ": " + e.what());
      }
      adam_step(params, state.adam, lr, train_config.weight_decay);
      for (const Parameter* p : params) {
        if (!p->value.all_finite()) {
          throw NumericalError("training diverged at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(step) + ": parameter " + p->name +
                               " is non-finite after the update");
        }
      }
      const double w = static_cast<double>(idx.size()) / static_cast<double>(n);
      rec.train_loss += w * l_total;
      rec.loss_cls += w * l_cls;
      rec.loss_sh += w * l_sh;
      rec.loss_ps += w * l_ps;
      rec.loss_diff += w * l_diff;
    }

    const Prediction val_pred = predict(model, val);
    if (options.on_validation) options.on_validation(epoch, val_pred);
    rec.val = evaluate_predictions(val_pred.probs, val.labels);
    const double auc = rec.val.get("AUC");
    if (auc > state.best_val_auc) {
      state.best_val_auc = auc;
      state.best_epoch = epoch;
      state.best_params = snapshot(model);
    }
    state.history.epochs.push_back(std::move(rec));
    state.epochs_done = epoch + 1;

    if (options.on_epoch_end) {
      state.params = snapshot(model);
      state.rng_state = rng_to_string(rng);
      options.on_epoch_end(state);
    }
  }

  state.params = snapshot(model);
  state.rng_state = rng_to_string(rng);

  FitResult result;
  result.history = state.history;
  result.best_state = state;
  if (!state.best_params.empty()) result.best_state.params = state.best_params;
  result.final_state = std::move(state);
  return result;
}

}  // namespace cfdlab
