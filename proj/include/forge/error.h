#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forge {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kMalformedSource,
  kNetworkUnreachable,
  kMissingManifest,
  kChecksumMismatch,
  kParseError,
  kNoGeo,
  kNoPath,
  kPoolTooSmall,
  kInsufficientFacts,
  kInsufficientLocations,
  kNoLiableFact,
  kAmbiguousVictim,
  kInvalidSpec,
  kIllegalAction,
  kStorageUnavailable,
  kUnknownGame,
  kUnknownSession,
  kUnknownSuspect,
  kDuplicateKey,
};

// Stable, machine-readable name ("not-found", "illegal-action", ...).
std::string_view error_code_name(ErrorCode code);

// All failures in the library are reported with this exception. `stage` names
// the pipeline stage that failed ("ingest", "graph", "pool", ...) and may be
// empty for errors raised outside a pipeline.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {})
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const { return code_; }
  const std::string& stage() const { return stage_; }

  // Copy of this error labeled with `stage`, unless a stage is already set.
  Error with_stage(std::string stage) const {
    return stage_.empty() ? Error(code_, what(), std::move(stage)) : *this;
  }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace forge
