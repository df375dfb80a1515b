// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/checkpoint.hpp"

#include "cfdlab/binary_io.hpp"
#include "cfdlab/config_json.hpp"
#include "cfdlab/error.hpp"

namespace cfdlab {

namespace {

void write_params(bin::Writer& w, const std::vector<Parameter>& ps) {
  w.u64(ps.size());
  for (const Parameter& p : ps) {
    w.str(p.name);
    w.matrix(p.value);
  }
}

std::vector<Parameter> read_params(bin::Reader& r) {
  const std::uint64_t count = r.u64();
  if (count > r.remaining()) throw FormatError(FormatError::Kind::kTruncated, "checkpoint: parameter count exceeds file");
  std::vector<Parameter> ps;
  ps.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.str();
    ps.emplace_back(std::move(name), r.matrix());
  }
  return ps;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& c) {
  bin::Writer w;
  w.bytes(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u64(config_hash(c.model, c.train));
  w.str(to_json(c.model).dump());
  w.str(to_json(c.train).dump());
  write_params(w, c.params);
  write_params(w, c.best_params);
  w.u64(c.adam.step);
  w.u64(c.adam.m.size());
  for (std::size_t i = 0; i < c.adam.m.size(); ++i) {
    w.matrix(c.adam.m[i]);
    w.matrix(c.adam.v[i]);
  }
  w.i32(c.epochs_done);
  w.str(c.rng_state);
  w.f64(c.best_val_auc);
  w.i32(c.best_epoch);
  w.str(c.history.to_json());
  std::string out = w.buffer();
  bin::Writer tail;
  tail.u32(bin::crc32(out));
  out += tail.buffer();
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes, const std::string& source) {
  if (bytes.size() < kCheckpointMagic.size() ||
      bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw FormatError(FormatError::Kind::kBadMagic, source + ": not a CFDC1 checkpoint");
  }
  if (bytes.size() < kCheckpointMagic.size() + 4 + 4) {
    throw FormatError(FormatError::Kind::kTruncated, source + ": truncated checkpoint");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  bin::Reader crc_reader(bytes.substr(bytes.size() - 4), source);
  if (crc_reader.u32() != bin::crc32(body)) {
    throw FormatError(FormatError::Kind::kChecksum, source + ": checksum mismatch");
  }

  bin::Reader r(body, source);
  r.bytes(kCheckpointMagic.size());
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError(FormatError::Kind::kMalformed,
                      source + ": unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint64_t hash = r.u64();
  Checkpoint c;
  try {
    c.model = model_config_from_json(Json::parse(r.str()));
    c.train = train_config_from_json(Json::parse(r.str()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatError::Kind::kMalformed, source + ": bad config block: " + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(FormatError::Kind::kMalformed, source + ": bad config block: " + e.what());
  }
  if (config_hash(c.model, c.train) != hash) {
    throw FormatError(FormatError::Kind::kConfigMismatch,
                      source + ": stored config hash does not match stored configs");
  }
  c.params = read_params(r);
  c.best_params = read_params(r);
  c.adam.step = r.u64();
  const std::uint64_t moments = r.u64();
  if (moments > r.remaining()) throw FormatError(FormatError::Kind::kTruncated, source + ": truncated moments");
  for (std::uint64_t i = 0; i < moments; ++i) {
    c.adam.m.push_back(r.matrix());
    c.adam.v.push_back(r.matrix());
  }
  c.epochs_done = r.i32();
  c.rng_state = r.str();
  c.best_val_auc = r.f64();
  c.best_epoch = r.i32();
  try {
    c.history = History::from_json(r.str());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatError::Kind::kMalformed, source + ": bad history block: " + e.what());
  }
  if (!r.at_end()) {
    throw FormatError(FormatError::Kind::kMalformed, source + ": trailing bytes");
  }
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  bin::write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(bin::read_file(path), path.string());
}

void require_config(const Checkpoint& ckpt, const ModelConfig& model, const TrainConfig& train) {
  if (config_hash(ckpt.model, ckpt.train) != config_hash(model, train)) {
    throw FormatError(FormatError::Kind::kConfigMismatch,
                      "checkpoint was written for a different configuration (" +
                          to_json(ckpt.model).dump() + " / " + to_json(ckpt.train).dump() + ")");
  }
}

}  // namespace cfdlab
