#include "crowdsmell/error.hpp"

namespace crowdsmell {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyProject: return "EmptyProject";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::BadBoolean: return "BadBoolean";
    case ErrorCode::DuplicateRowWithinTeam: return "DuplicateRowWithinTeam";
    case ErrorCode::MixedSmellKinds: return "MixedSmellKinds";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::FeatureMismatch: return "FeatureMismatch";
    case ErrorCode::TooFewInstances: return "TooFewInstances";
    case ErrorCode::TooFewGroups: return "TooFewGroups";
    case ErrorCode::InvalidDegreesOfFreedom: return "InvalidDegreesOfFreedom";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownCandidate: return "UnknownCandidate";
    case ErrorCode::UnknownTeam: return "UnknownTeam";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::NothingToExport: return "NothingToExport";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace crowdsmell
