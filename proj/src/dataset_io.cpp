// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/dataset_io.hpp"

#include <algorithm>
#include <cmath>

#include "cfdlab/binary_io.hpp"
#include "cfdlab/csv.hpp"
#include "cfdlab/error.hpp"

namespace cfdlab {

namespace {

constexpr std::string_view kProvenanceTag = "PROV";

void write_body(bin::Writer& w, const Matrix& m) {
  for (double v : m.data()) w.f64(v);
}

}  // namespace

std::string encode_dataset(const Dataset& d) {
  d.validate();
  bin::Writer w;
  w.bytes(kDatasetMagic);
  w.u32(static_cast<std::uint32_t>(d.num_modalities()));
  w.u64(d.size());
  w.u64(d.in_dim());
  w.u32(static_cast<std::uint32_t>(d.num_cls));
  for (const Matrix& m : d.modalities) write_body(w, m);
  for (int y : d.labels) w.u32(static_cast<std::uint32_t>(y));
  if (d.provenance) {
    const Provenance& p = *d.provenance;
    w.bytes(kProvenanceTag);
    w.u64(p.factor_dim);
    w.u32(static_cast<std::uint32_t>(p.subsets.size()));
    for (std::size_t s = 0; s < p.subsets.size(); ++s) {
      w.u32(p.subsets[s].mask());
      write_body(w, p.factors[s]);
      for (const Matrix& a : p.mixing[s]) write_body(w, a);
    }
    w.u32(static_cast<std::uint32_t>(p.informative.size()));
    for (const Subset& s : p.informative) w.u32(s.mask());
    w.matrix(p.readout);
    w.matrix(p.label_bias);
  }
  return w.buffer();
}

Dataset decode_dataset(std::string_view bytes, const std::string& source) {
  bin::Reader r(bytes, source);
  if (bytes.size() < kDatasetMagic.size() || bytes.substr(0, kDatasetMagic.size()) != kDatasetMagic) {
    throw FormatError(FormatError::Kind::kBadMagic,
                      source + ": bad magic (expected \"" + std::string(kDatasetMagic) + "\")");
  }
  r.bytes(kDatasetMagic.size());
  const std::uint32_t m = r.u32();
  const std::uint64_t n = r.u64();
  const std::uint64_t in_dim = r.u64();
  const std::uint32_t num_cls = r.u32();
  if (m < 2 || m > 16 || num_cls < 2) {
    throw FormatError(FormatError::Kind::kMalformed,
                      source + ": implausible header (M=" + std::to_string(m) +
                          ", num_cls=" + std::to_string(num_cls) + ")");
  }

  Dataset d;
  d.num_cls = num_cls;
  for (std::uint32_t j = 0; j < m; ++j) d.modalities.push_back(r.matrix_body(n, in_dim));
  d.labels.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t y = r.u32();
    if (y >= num_cls) {
      throw FormatError(FormatError::Kind::kLabelRange,
                        source + ": label " + std::to_string(y) + " at sample " +
                            std::to_string(i) + " outside [0," + std::to_string(num_cls) + ")");
    }
    d.labels.push_back(static_cast<int>(y));
  }
  if (r.at_end()) return d;

  if (r.remaining() < kProvenanceTag.size() || r.bytes(kProvenanceTag.size()) != kProvenanceTag) {
    throw FormatError(FormatError::Kind::kMalformed, source + ": trailing bytes after labels");
  }
  Provenance p;
  p.factor_dim = r.u64();
  const std::uint32_t count = r.u32();
  for (std::uint32_t s = 0; s < count; ++s) {
    const Subset sub(r.u32());
    p.subsets.push_back(sub);
    p.factors.push_back(r.matrix_body(n, p.factor_dim));
    std::vector<Matrix> maps;
    for (int i = 0; i < sub.size(); ++i) maps.push_back(r.matrix_body(p.factor_dim, in_dim));
    p.mixing.push_back(std::move(maps));
  }
  const std::uint32_t n_inf = r.u32();
  for (std::uint32_t i = 0; i < n_inf; ++i) p.informative.emplace_back(r.u32());
  p.readout = r.matrix();
  p.label_bias = r.matrix();
  if (!r.at_end()) {
    throw FormatError(FormatError::Kind::kMalformed, source + ": trailing bytes after provenance");
  }
  d.provenance = std::move(p);
  return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  bin::write_file_atomic(path, encode_dataset(d));
}

Dataset load_dataset(const std::filesystem::path& path) {
  const std::string bytes = bin::read_file(path);
  return decode_dataset(bytes, path.string());
}

Dataset load_dataset_csv(const std::vector<std::filesystem::path>& modality_files,
                         const std::filesystem::path& labels_file, std::size_t num_cls) {
  if (modality_files.size() < 2) throw ConfigError("csv dataset: need at least 2 modality files");
  Dataset d;
  for (const auto& path : modality_files) {
    const auto rows = csv::read_numeric(path);
    if (rows.empty()) throw FormatError(FormatError::Kind::kMalformed, path.string() + ": no rows");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols()) {
        throw FormatError(FormatError::Kind::kMalformed,
                          path.string() + ": ragged row " + std::to_string(r + 1));
      }
      std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    d.modalities.push_back(std::move(m));
  }
  int max_label = -1;
  for (const auto& row : csv::read_numeric(labels_file)) {
    const double v = row.back();
    if (v < 0 || v != std::floor(v)) {
      throw FormatError(FormatError::Kind::kLabelRange,
                        labels_file.string() + ": label " + csv::format_double(v) +
                            " is not a class index");
    }
    d.labels.push_back(static_cast<int>(v));
    max_label = std::max(max_label, d.labels.back());
  }
  d.num_cls = num_cls != 0 ? num_cls : static_cast<std::size_t>(max_label + 1);
  if (num_cls != 0 && max_label >= static_cast<int>(num_cls)) {
    throw FormatError(FormatError::Kind::kLabelRange,
                      labels_file.string() + ": label " + std::to_string(max_label) +
                          " outside [0," + std::to_string(num_cls) + ")");
  }
  d.validate();
  return d;
}

}  // namespace cfdlab
