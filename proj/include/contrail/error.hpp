// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contrail {

enum class ErrorKind {
  // ingest
  MissingSnapshot,
  SchemaError,
  MonotonicityError,
  DimensionError,
  DuplicateRunId,
  EmptyEnsemble,
  // thermo
  OutOfRange,
  DegenerateLine,
  // shape
  DegenerateInput,
  // similarity
  SchemaMismatch,
  EmptySet,
  TooFewMembers,
  // generic
  InvalidArgument,
  IoError,
  ConfigError,
  NotFound,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure the library reports carries a machine-readable kind plus a
/// human-readable detail (the offending column, timestep, id...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingSnapshot: return "MissingSnapshot";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::MonotonicityError: return "MonotonicityError";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::DuplicateRunId: return "DuplicateRunId";
    case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DegenerateLine: return "DegenerateLine";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::TooFewMembers: return "TooFewMembers";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::NotFound: return "NotFound";
  }
  return "Unknown";
}

}  // namespace contrail
