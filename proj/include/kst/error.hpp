#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kst {

enum class ErrorCode {
  UnknownItem,
  DuplicateItem,
  EmptyDomain,
  MissingEmptyOrFull,
  WidthMismatch,
  StateNotInStructure,
  NoMatch,
  MultipleMatches,
  NotUnionClosed,
  NotLearningSpace,
  EmptyClauseList,
  NotReflexive,
  NotTransitive,
  EmptyOrFullSubdomain,
  TraceMismatch,
  RepeatedItem,
  MalformedString,
  MalformedWord,
  ZetaOutOfRange,
  InvalidProbability,
  InteractiveResponderNeedsExternalAnswer,
  BadPartition,
  ItemInAntecedent,
  OracleFailure,
  ParseError,
  SessionNotFound,
  SpaceNotFound,
  SessionFinished,
  BadRequest,
  StoreCorruption,
  BindError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::DuplicateItem: return "DuplicateItem";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::MissingEmptyOrFull: return "MissingEmptyOrFull";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::StateNotInStructure: return "StateNotInStructure";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::MultipleMatches: return "MultipleMatches";
    case ErrorCode::NotUnionClosed: return "NotUnionClosed";
    case ErrorCode::NotLearningSpace: return "NotLearningSpace";
    case ErrorCode::EmptyClauseList: return "EmptyClauseList";
    case ErrorCode::NotReflexive: return "NotReflexive";
    case ErrorCode::NotTransitive: return "NotTransitive";
    case ErrorCode::EmptyOrFullSubdomain: return "EmptyOrFullSubdomain";
    case ErrorCode::TraceMismatch: return "TraceMismatch";
    case ErrorCode::RepeatedItem: return "RepeatedItem";
    case ErrorCode::MalformedString: return "MalformedString";
    case ErrorCode::MalformedWord: return "MalformedWord";
    case ErrorCode::ZetaOutOfRange: return "ZetaOutOfRange";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InteractiveResponderNeedsExternalAnswer:
      return "InteractiveResponderNeedsExternalAnswer";
    case ErrorCode::BadPartition: return "BadPartition";
    case ErrorCode::ItemInAntecedent: return "ItemInAntecedent";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SessionNotFound: return "SessionNotFound";
    case ErrorCode::SpaceNotFound: return "SpaceNotFound";
    case ErrorCode::SessionFinished: return "SessionFinished";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::StoreCorruption: return "StoreCorruption";
    case ErrorCode::BindError: return "BindError";
  }
  return "Unknown";
}

/// All library failures are reported through this exception; `code()` is
/// the stable, machine-readable part.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace kst
