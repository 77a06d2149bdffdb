#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crowdsmell {

enum class ErrorCode {
  EmptyProject,
  IoError,
  ParseError,
  UnknownEntity,
  SchemaMismatch,
  BadBoolean,
  DuplicateRowWithinTeam,
  MixedSmellKinds,
  DegenerateData,
  NonFiniteFeature,
  FeatureMismatch,
  TooFewInstances,
  TooFewGroups,
  InvalidDegreesOfFreedom,
  InvalidArgument,
  UnknownCandidate,
  UnknownTeam,
  UnknownSession,
  NothingToExport,
  UsageError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure the library reports carries one of the codes above so
/// callers (CLI, HTTP layer) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crowdsmell
