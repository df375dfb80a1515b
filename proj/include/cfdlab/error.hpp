// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cfdlab {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside its documented domain (rates, counts, label ids).
class ValueError : public Error {
 public:
  using Error::Error;
};

/// A value became NaN/Inf, or training diverged.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid run / model / data configuration. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Misuse of the autodiff tape (double backward, non-scalar root).
class TapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed on-disk file. `kind()` tells the failure modes apart.
class FormatError : public Error {
 public:
  enum class Kind {
    kBadMagic,
    kTruncated,
    kLabelRange,
    kChecksum,
    kConfigMismatch,
    kMalformed,
  };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace cfdlab
