// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cfdlab/synthdata.hpp"

namespace cfdlab {

// Binary dataset layout (all integers and reals little-endian):
//
//   "CFDL1"                         5-byte magic
//   u32 M, u64 n, u64 in_dim, u32 num_cls
//   M blocks of n*in_dim f64        modality j, row-major
//   n x u32                         labels
//   optional provenance block:
//     "PROV", u64 factor_dim, u32 subset count
//     per subset: u32 mask, z_S (n*factor_dim f64), |S| maps (factor_dim*in_dim f64)
//     u32 informative count, that many u32 masks
//     readout  (u64 rows, u64 cols, f64 data)
//     label_bias (u64 rows, u64 cols, f64 data)
//
// A file that ends right after the labels has no provenance.

inline constexpr std::string_view kDatasetMagic = "CFDL1";

std::string encode_dataset(const Dataset& d);
Dataset decode_dataset(std::string_view bytes, const std::string& source = "dataset");

/// Atomic write (temp file + rename).
void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

/// Externally extracted features: one numeric CSV per modality (rows =
/// samples) and a labels CSV whose last column is the class index. A
/// non-numeric first line is treated as a header. num_cls = max label + 1
/// unless given.
Dataset load_dataset_csv(const std::vector<std::filesystem::path>& modality_files,
                         const std::filesystem::path& labels_file, std::size_t num_cls = 0);

}  // namespace cfdlab
