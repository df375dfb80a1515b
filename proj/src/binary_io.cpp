// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/binary_io.hpp"

#include <zlib.h>

#include <bit>
#include <fstream>
#include <sstream>

#include "cfdlab/error.hpp"

namespace cfdlab::bin {

void Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void Writer::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void Writer::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void Writer::str(std::string_view s) {
  u64(s.size());
  buf_.append(s);
}

void Writer::matrix(const Matrix& m) {
  u64(m.rows());
  u64(m.cols());
  for (double v : m.data()) f64(v);
}

void Reader::need(std::size_t n) {
  if (data_.size() - pos_ < n) {
    throw FormatError(FormatError::Kind::kTruncated,
                      what_ + ": truncated at byte " + std::to_string(pos_) + " (needed " +
                          std::to_string(n) + " more, " + std::to_string(remaining()) + " left)");
  }
}

std::string_view Reader::bytes(std::size_t n) {
  need(n);
  auto out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t Reader::u8() {
  need(1);
  return static_cast<std::uint8_t>(data_[pos_++]);
}

std::uint32_t Reader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
  return v;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
  return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

std::string Reader::str() {
  const std::uint64_t n = u64();
  need(n);
  return std::string(bytes(n));
}

Matrix Reader::matrix() {
  const std::uint64_t rows = u64();
  const std::uint64_t cols = u64();
  return matrix_body(rows, cols);
}

Matrix Reader::matrix_body(std::size_t rows, std::size_t cols) {
  if (cols != 0 && rows > remaining() / 8 / cols) {
    throw FormatError(FormatError::Kind::kTruncated,
                      what_ + ": truncated; a " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " block does not fit in the " +
                          std::to_string(remaining()) + " bytes left");
  }
  Matrix m(rows, cols);
  for (double& v : m.data()) v = f64();
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::uint32_t crc32(std::string_view data) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  c = ::crc32(c, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
  return static_cast<std::uint32_t>(c);
}

}  // namespace cfdlab::bin
