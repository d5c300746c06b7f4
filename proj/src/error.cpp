#include "relevance/error.hpp"

namespace relevance {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownClassReference: return "UnknownClassReference";
    case ErrorKind::CyclicSupport: return "CyclicSupport";
    case ErrorKind::UnclassifiedElement: return "UnclassifiedElement";
    case ErrorKind::AmbiguousClassMembership: return "AmbiguousClassMembership";
    case ErrorKind::UnknownElementId: return "UnknownElementId";
    case ErrorKind::UnknownObjective: return "UnknownObjective";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::UnknownElement: return "UnknownElement";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::InvalidProbability: return "InvalidProbability";
    case ErrorKind::InvalidThresholds: return "InvalidThresholds";
    case ErrorKind::EndpointUnreachable: return "EndpointUnreachable";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::InsufficientResult: return "InsufficientResult";
    case ErrorKind::NonMonotonicTick: return "NonMonotonicTick";
    case ErrorKind::EmptyScenario: return "EmptyScenario";
    case ErrorKind::InconsistentInstance: return "InconsistentInstance";
    case ErrorKind::GoalPruned: return "GoalPruned";
    case ErrorKind::EmptyTruth: return "EmptyTruth";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace relevance
