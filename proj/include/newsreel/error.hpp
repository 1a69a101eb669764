// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace newsreel {

enum class ErrorKind {
  InvalidArgument,
  MissingFile,
  Malformed,
  CountMismatch,
  DimensionMismatch,
  BadMagic,
  UnsupportedVersion,
  Truncated,
  Validation,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::MissingFile: return "missing file";
    case ErrorKind::Malformed: return "malformed input";
    case ErrorKind::CountMismatch: return "count mismatch";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::BadMagic: return "bad magic";
    case ErrorKind::UnsupportedVersion: return "unsupported version";
    case ErrorKind::Truncated: return "truncated payload";
    case ErrorKind::Validation: return "validation failed";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

/// Every failure raised by the library carries a kind so callers (and the CLI
/// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace newsreel
