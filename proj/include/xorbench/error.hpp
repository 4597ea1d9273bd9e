#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xorbench {

enum class ErrorKind {
  OddSize,
  TooSmall,
  GenerationStall,
  LengthMismatch,
  Inconsistent,
  SyntaxError,
  InvariantViolation,
  IndexOutOfRange,
  NonFiniteField,
  DomainError,
  EmptyGrid,
  NoRecords,
  PlanInvalid,
  Io,
  InsufficientPoints,
  NonPositiveValue,
  InsufficientResamples,
  NoData,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OddSize: return "OddSize";
    case ErrorKind::TooSmall: return "TooSmall";
    case ErrorKind::GenerationStall: return "GenerationStall";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonFiniteField: return "NonFiniteField";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::NoRecords: return "NoRecords";
    case ErrorKind::PlanInvalid: return "PlanInvalid";
    case ErrorKind::Io: return "Io";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::NonPositiveValue: return "NonPositiveValue";
    case ErrorKind::InsufficientResamples: return "InsufficientResamples";
    case ErrorKind::NoData: return "NoData";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace xorbench
