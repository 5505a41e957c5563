#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace simdoc {

// Every domain failure carries one of these names; the CLI prints the name
// and maps it to an exit code.
enum class ErrorCode {
  EmptyText,
  EmptyToken,
  NoText,
  NoReference,
  NoSamples,
  MissingComplex,
  InvalidRating,
  DegenerateLabels,
  ModeMismatch,
  InvalidLoss,
  BackendUnavailable,
  ProtocolViolation,
  ConfigError,
  PreconditionViolation,
  IoError,
  ParseError,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::EmptyToken: return "EmptyToken";
    case ErrorCode::NoText: return "NoText";
    case ErrorCode::NoReference: return "NoReference";
    case ErrorCode::NoSamples: return "NoSamples";
    case ErrorCode::MissingComplex: return "MissingComplex";
    case ErrorCode::InvalidRating: return "InvalidRating";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::InvalidLoss: return "InvalidLoss";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::PreconditionViolation, message);
}

}  // namespace simdoc
