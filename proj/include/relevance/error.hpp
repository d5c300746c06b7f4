#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relevance {

enum class ErrorKind {
  DuplicateId,
  UnknownClassReference,
  CyclicSupport,
  UnclassifiedElement,
  AmbiguousClassMembership,
  UnknownElementId,
  UnknownObjective,
  UnknownClass,
  UnknownElement,
  InvalidDistribution,
  InvalidProbability,
  InvalidThresholds,
  EndpointUnreachable,
  MalformedResponse,
  InsufficientResult,
  NonMonotonicTick,
  EmptyScenario,
  InconsistentInstance,
  GoalPruned,
  EmptyTruth,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace relevance
