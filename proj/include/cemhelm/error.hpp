#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cemhelm {

enum class ErrorKind {
  kSingularMatrix,
  kDimensionMismatch,
  kNotPositiveDefinite,
  kIndivisibleMesh,
  kInvalidElement,
  kInvalidArgument,
  kMalformedRaster,
  kNonPositiveValue,
  kMissingRaster,
  kZeroReference,
  kIoError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Same error with the pipeline stage prepended to the message.
  Error in_stage(std::string_view stage) const {
    return Error(kind_, std::string(stage) + ": " + what(), Raw{});
  }

 private:
  struct Raw {};
  Error(ErrorKind kind, const std::string& what, Raw) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSingularMatrix: return "SingularMatrix";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::kIndivisibleMesh: return "IndivisibleMesh";
    case ErrorKind::kInvalidElement: return "InvalidElement";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kMalformedRaster: return "MalformedRaster";
    case ErrorKind::kNonPositiveValue: return "NonPositiveValue";
    case ErrorKind::kMissingRaster: return "MissingRaster";
    case ErrorKind::kZeroReference: return "ZeroReference";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

// Warnings go to stderr unless a sink is installed.
using WarningSink = void (*)(std::string_view);
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace cemhelm
