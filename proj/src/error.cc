#include "omnivo/error.h"

namespace omnivo {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegeneratePoint: return "DegeneratePoint";
    case ErrorCode::kPoleSingular: return "PoleSingular";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kNearPiRotation: return "NearPiRotation";
    case ErrorCode::kDuplicateFrame: return "DuplicateFrame";
    case ErrorCode::kNoFreeVariables: return "NoFreeVariables";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kDivergenceDetected: return "DivergenceDetected";
    case ErrorCode::kInsufficientVisibility: return "InsufficientVisibility";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNonUnitQuaternion: return "NonUnitQuaternion";
    case ErrorCode::kPoleProximity: return "PoleProximity";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace omnivo
