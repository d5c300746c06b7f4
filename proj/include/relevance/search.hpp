#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "relevance/planner.hpp"

namespace relevance {

struct SearchLimits {
  double timeout_seconds = 120.0;
  /// Stored-state cap; 0 means unlimited. Hitting it reports a timeout.
  std::size_t max_states = 0;
  /// Expansion cap used for reproducible runs; hitting it reports a timeout.
  std::optional<std::size_t> max_expansions;
};

enum class SolveStatus { Solved, Timeout, Unsolvable };
enum class LimitReason { None, WallClock, StateBudget, ExpansionBudget };

std::string_view to_string(SolveStatus status);
std::string_view to_string(LimitReason reason);

struct SearchStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
  std::size_t stored = 0;
  std::size_t ground_actions = 0;
  double seconds = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unsolvable;
  std::optional<Plan> plan;
  LimitReason limit = LimitReason::None;
  SearchStats stats;
};

/// Greedy best-first search on the goal-count heuristic, FIFO among equal
/// values, with duplicate elimination. Reentrant.
SolveResult solve(const PlanningProblem& problem, const SearchLimits& limits);
SolveResult solve(const PlanningProblem& problem, double timeout_seconds);

}  // namespace relevance
