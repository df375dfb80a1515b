// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "cfdlab/matrix.hpp"

namespace cfdlab::bin {

/// Little-endian encoder into an in-memory buffer.
class Writer {
 public:
  void bytes(std::string_view s) { buf_.append(s); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  /// Length-prefixed (u64) byte string.
  void str(std::string_view s);
  /// u64 rows, u64 cols, then row-major f64 data.
  void matrix(const Matrix& m);

  [[nodiscard]] const std::string& buffer() const noexcept { return buf_; }

 private:
  std::string buf_;
};

/// Little-endian decoder; every short read throws FormatError(kTruncated).
class Reader {
 public:
  Reader(std::string_view data, std::string what) : data_(data), what_(std::move(what)) {}

  std::string_view bytes(std::size_t n);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::string str();
  Matrix matrix();
  /// Reads a rows x cols matrix whose shape the caller already knows.
  Matrix matrix_body(std::size_t rows, std::size_t cols);

  [[nodiscard]] bool at_end() const noexcept { return pos_ == data_.size(); }
  [[nodiscard]] std::size_t position() const noexcept { return pos_; }
  [[nodiscard]] std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  void need(std::size_t n);

  std::string_view data_;
  std::size_t pos_ = 0;
  std::string what_;
};

std::string read_file(const std::filesystem::path& path);
/// Writes `<path>.tmp` then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// zlib CRC-32 of a byte range.
std::uint32_t crc32(std::string_view data);

}  // namespace cfdlab::bin
