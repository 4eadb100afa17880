#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wnforge {

enum class ErrorCode {
  EmptyLemma,
  IllegalChar,
  InvalidLanguage,
  ParseError,
  DanglingRelation,
  DuplicateSynset,
  InvalidRelation,
  CycleDetected,
  PairNotInGraph,
  SampleTooLarge,
  NotInSample,
  IncompleteSample,
  MissingConfidence,
  VersionConflict,
  PivotImmutable,
  UnknownEntity,
  UnknownLanguage,
  NotFound,
  AmbiguousIndex,
  UnknownRelation,
  NoBaseConcepts,
  UnknownResource,
  ResourceUnreadable,
  StoreCorrupt,
  IoError,
  BindError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wnforge
