#pragma once

#include <string>

#include "relevance/planner.hpp"

namespace relevance {

struct PddlText {
  std::string domain;
  std::string problem;
};

/// STRIPS with :typing.
PddlText export_pddl(const PlanningProblem& problem);

/// Parses the subset export_pddl() writes (plus comments and any whitespace
/// layout). Throws ParseError.
PlanningProblem import_pddl(const std::string& domain_text, const std::string& problem_text);

}  // namespace relevance
