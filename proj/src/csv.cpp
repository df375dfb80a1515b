// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/csv.hpp"

#include <charconv>
#include <sstream>

#include "cfdlab/binary_io.hpp"
#include "cfdlab/error.hpp"

namespace cfdlab::csv {

namespace {

// Splits one record; double-quoted cells may hold commas and "" escapes.
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cells.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.emplace_back();
    } else {
      cells.back() += ch;
    }
  }
  return cells;
}

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Table read(const std::filesystem::path& path, bool has_header) {
  std::stringstream in(bin::read_file(path));
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && has_header) {
      t.header = split(line);
    } else {
      t.rows.push_back(split(line));
    }
    first = false;
  }
  return t;
}

std::vector<std::vector<double>> read_numeric(const std::filesystem::path& path) {
  Table t = read(path, false);
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::vector<double> values(t.rows[r].size());
    bool ok = true;
    for (std::size_t c = 0; c < values.size() && ok; ++c) ok = parse_double(t.rows[r][c], values[c]);
    if (!ok) {
      if (r == 0) continue;  // header
      throw FormatError(FormatError::Kind::kMalformed,
                        path.string() + ": non-numeric cell on data row " + std::to_string(r + 1));
    }
    out.push_back(std::move(values));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Writer::Writer(std::vector<std::string> header) : width_(header.size()) { row(header); }

void Writer::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) {
    throw ShapeError("csv: row has " + std::to_string(cells.size()) + " cells, header has " +
                     std::to_string(width_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += quote(cells[i]);
  }
  out_ += '\n';
}

void Writer::row(const std::string& first, const std::vector<double>& values) {
  std::vector<std::string> cells{first};
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

void Writer::save(const std::filesystem::path& path) const { bin::write_file_atomic(path, out_); }

}  // namespace cfdlab::csv
