#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "relevance/generators.hpp"
#include "relevance/scene.hpp"

namespace relevance {

/// Ground or lifted atom; lifted arguments start with '?'.
using Atom = GoalAtom;

std::string to_string(const Atom& atom);

struct TypedName {
  std::string name;
  std::string type;

  friend bool operator==(const TypedName&, const TypedName&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> parameters;
  std::vector<Atom> preconditions;
  std::vector<Atom> add_effects;
  std::vector<Atom> del_effects;

  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

struct PlanningDomain {
  std::string name;
  std::vector<TypedName> types;  // (type, parent type)
  std::vector<std::pair<std::string, std::vector<TypedName>>> predicates;
  std::vector<ActionSchema> actions;

  /// True when `type` equals `ancestor` or derives from it.
  bool is_subtype(const std::string& type, const std::string& ancestor) const;
  const ActionSchema* find_action(const std::string& name) const;

  friend bool operator==(const PlanningDomain&, const PlanningDomain&) = default;
};

/// Pick / place / move-off / open / serve over items, places and delivery levels.
const PlanningDomain& serve_domain();

struct PlanningProblem {
  std::string name;
  PlanningDomain domain;
  std::vector<TypedName> objects;
  std::set<Atom> init;
  std::vector<Atom> goal;

  const TypedName* find_object(const std::string& name) const;
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<Atom> preconditions;
  std::vector<Atom> add_effects;
  std::vector<Atom> del_effects;

  std::string to_string() const;  // "(pick coffee table)"
};

struct Plan {
  std::vector<GroundAction> steps;

  std::size_t cost() const { return steps.size(); }
};

/// Instantiates `name(args)` against the domain; nullopt on an unknown action,
/// wrong arity or ill-typed argument.
std::optional<GroundAction> instantiate(const PlanningProblem& problem, const std::string& name,
                                        const std::vector<std::string>& args);

/// Every action instance whose static preconditions hold and whose
/// preconditions are reachable in the delete relaxation, in schema order.
std::vector<GroundAction> ground(const PlanningProblem& problem);

/// Stacking becomes on/clear/loose atoms, containment becomes closed
/// containers that must be opened, and deliveries are capped at the number of
/// served goals plus `spare_deliveries`. Throws InconsistentInstance.
PlanningProblem compile(const SceneRepresentation& scene, const std::vector<Atom>& goal,
                        int spare_deliveries = 0, std::string name = "problem");

/// Simple instances get no spare deliveries; hard ones get one.
PlanningProblem compile(const ProblemInstance& instance);

/// Removes scene objects outside `keep` and every atom mentioning them. An item
/// whose support was removed becomes loose; an item whose load was removed
/// becomes clear. Throws GoalPruned when a goal atom mentions a removed object.
PlanningProblem prune(const PlanningProblem& problem, const IdSet& keep);

struct ValidationResult {
  bool accepted = false;
  std::optional<std::size_t> failed_step;
  std::string reason;
};

/// Re-instantiates each step from the domain and simulates it from init.
ValidationResult validate(const PlanningProblem& problem, const Plan& plan);

}  // namespace relevance
