#pragma once

#include <stdexcept>
#include <string>

namespace omnivo {

enum class ErrorCode {
  kInvalidArgument,
  kDegeneratePoint,
  kPoleSingular,
  kNonPositiveDepth,
  kNearPiRotation,
  kDuplicateFrame,
  kNoFreeVariables,
  kSingularSystem,
  kDivergenceDetected,
  kInsufficientVisibility,
  kNoOverlap,
  kDegenerateConfiguration,
  kParseError,
  kNonUnitQuaternion,
  kPoleProximity,
  kIoError,
};

const char* to_string(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets callers (e.g. the BA loop) react to specific conditions without
// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace omnivo
