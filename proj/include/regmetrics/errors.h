#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regmetrics {

enum class ErrorCode {
  kInsufficientPairs,
  kDegenerateSample,
  kTooFewPoints,
  kEmptyCloud,
  kKTooLarge,
  kInvalidSpec,
  kTooFewCorrespondences,
  kPersistentDegeneracy,
  kMissingClouds,
  kBadConfig,
  kEmptyGroundTruth,
  kInvalidInput,
  kParseError,
  kUnsupportedFormat,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace regmetrics
