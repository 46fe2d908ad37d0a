#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psyscale {

enum class ErrorCode {
  InsufficientData,
  MalformedResponse,
  NonConvergence,
  MalformedImage,
  InvalidParameter,
  UndefinedJaccard,
  MalformedEmbedding,
  MissingEmbedding,
  DuplicateId,
  DimMismatch,
  ParseError,
  UndefinedCorrelation,
  InsufficientOverlap,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Validation errors are caller mistakes (bad input, bad parameters); the CLI
// maps them to exit code 2. Everything else is a runtime failure.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace psyscale
