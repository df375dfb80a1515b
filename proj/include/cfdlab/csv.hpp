// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cfdlab::csv {

struct Table {
  std::vector<std::string> header;  ///< empty when the file had none
  std::vector<std::vector<std::string>> rows;
};

/// Splits on commas; double-quoted cells may contain commas and "" escapes.
Table read(const std::filesystem::path& path, bool has_header);
/// Parses every cell as a double; a non-numeric first row is taken as a header.
std::vector<std::vector<double>> read_numeric(const std::filesystem::path& path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Accumulates rows and writes atomically.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  void row(const std::string& first, const std::vector<double>& values);
  [[nodiscard]] std::string str() const { return out_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t width_;
  std::string out_;
};

}  // namespace cfdlab::csv
