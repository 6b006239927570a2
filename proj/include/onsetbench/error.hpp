#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace onsetbench {

enum class ErrorKind {
  InvalidArgument,
  OutOfRange,
  DisjointGrids,
  UnitMismatch,
  ShapeMismatch,
  MissingData,
  InsufficientData,
  Undecidable,
  EnsembleSize,
  Undefined,
  MalformedFile,
  LengthMismatch,
  UnsupportedVersion,
  DuplicateKey,
  ParseError,
  ConfigError,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the engine; `kind()` is what the CLI reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace onsetbench
