#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relevance/probability.hpp"
#include "relevance/scene.hpp"

namespace relevance {

enum class DomainKind { Coffee, Cereal };
enum class Difficulty { Simple, Hard };

std::string_view to_string(DomainKind domain);
std::string_view to_string(Difficulty difficulty);
DomainKind parse_domain(std::string_view text);
Difficulty parse_difficulty(std::string_view text);

/// Ground goal atom over element ids and the fixed places "table" and "tray".
struct GoalAtom {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const GoalAtom&, const GoalAtom&) = default;
};

struct ProblemInstance {
  DomainKind domain = DomainKind::Coffee;
  Difficulty difficulty = Difficulty::Simple;
  std::uint64_t seed = 0;
  SceneRepresentation scene;
  IdSet ground_truth_relevant;
  Objective objective;
  std::vector<TaskSpec> tasks;
  ProbabilityTable oracle_table;
  std::vector<GoalAtom> planning_goal;
  /// Cues the benchmark supplies (the declared task).
  std::vector<std::string> cues;
  /// Element injected with a deliberately borderline score, if any.
  std::optional<ElementId> borderline;
  /// Where the person stands; drives the nearest-first duplicate weighting.
  Position human_position;

  std::string case_id() const;
};

/// Coffee: 19 base objects (+10..30 distractors, 3 random stackings) or
/// 36 base objects (+20..50 distractors, 8 random stackings).
ProblemInstance gen_coffee(Difficulty difficulty, std::uint64_t seed);

/// Cereal: 18 base objects with 20 fixed container/stacking dependencies
/// (+10..45 distractors), or 26 base objects (+30..60 distractors).
ProblemInstance gen_cereal(Difficulty difficulty, std::uint64_t seed);

ProblemInstance generate(DomainKind domain, Difficulty difficulty, std::uint64_t seed);

/// The 19-object Coffee base scene with nominal probabilities: no
/// distractors, no stacking, no jitter.
ProblemInstance coffee_reference_instance();

struct DistractorTemplate {
  std::string name;
  std::string class_id;
  double p_high = 0.0;
};

/// 200 distinct distractor templates; stable across runs.
const std::vector<DistractorTemplate>& kitchenware_pool();

/// Preferences recorded for the first person in the two-person coffee demo.
std::vector<Preference> coffee_demo_preferences(const std::string& human_id);

/// Composed oracle score of every element under the instance's declared cues
/// (used by calibration checks).
std::map<ElementId, double> oracle_scores(const ProblemInstance& instance);

nlohmann::json instance_to_json(const ProblemInstance& instance);

/// Writes scene.json, table.json, goal.json and instance.json into `dir`.
void write_instance_bundle(const ProblemInstance& instance, const std::string& dir);

}  // namespace relevance
