#include "regmetrics/errors.h"

namespace regmetrics {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInsufficientPairs: return "InsufficientPairs";
    case ErrorCode::kDegenerateSample: return "DegenerateSample";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kTooFewCorrespondences: return "TooFewCorrespondences";
    case ErrorCode::kPersistentDegeneracy: return "PersistentDegeneracy";
    case ErrorCode::kMissingClouds: return "MissingClouds";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

}  // namespace regmetrics
