#include "psyscale/error.hpp"

namespace psyscale {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::MalformedImage: return "MalformedImage";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::UndefinedJaccard: return "UndefinedJaccard";
    case ErrorCode::MalformedEmbedding: return "MalformedEmbedding";
    case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UndefinedCorrelation: return "UndefinedCorrelation";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConvergence:
    case ErrorCode::IoError:
    case ErrorCode::MissingEmbedding:
      return false;
    default:
      return true;
  }
}

}  // namespace psyscale
