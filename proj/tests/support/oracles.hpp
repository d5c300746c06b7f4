#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the code path it is used to check.

#include <cmath>
#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "relevance/events.hpp"
#include "relevance/planner.hpp"
#include "relevance/probability.hpp"
#include "relevance/rng.hpp"
#include "relevance/scene.hpp"

namespace oracle {

using namespace relevance;

// ---------------------------------------------------------------------------
// Relevance

struct ClassCase {
  std::shared_ptr<const SceneRepresentation> scene;
  ProbabilityTable table;
  Objective objective{"o", "random objective"};
  std::vector<TaskSpec> tasks;
};

/// One class with 1-3 members, m tasks, a single unconditional stage and
/// random P(C|T) entries. Some task masses are exactly zero.
inline ClassCase random_class_case(Rng& rng) {
  ClassCase c;
  const auto m = static_cast<std::size_t>(rng.uniform_int(1, 6));
  const auto members = static_cast<std::size_t>(rng.uniform_int(1, 3));
  std::vector<Element> elements;
  AttributeClass cls{"c0", "class zero", "random", {}};
  for (std::size_t i = 0; i < members; ++i) {
    const auto id = "e" + std::to_string(i);
    elements.push_back({id, "thing " + std::to_string(i), "c0", {}, std::nullopt});
    cls.member_ids.push_back(id);
  }
  c.scene = std::make_shared<const SceneRepresentation>(build_scene(elements, {cls}, {}));

  c.table.objectives[c.objective.id] = c.objective;
  TaskDistribution dist;
  double total = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const auto id = "t" + std::to_string(t);
    c.tasks.push_back({id, ""});
    const double w = (m > 1 && rng.bernoulli(0.15)) ? 0.0 : rng.uniform(0.01, 1.0);
    dist[id] = w;
    total += w;
    c.table.class_given_task[{"c0", id, c.objective.id}] = rng.uniform01();
  }
  if (total == 0.0) {
    dist.begin()->second = 1.0;
    total = 1.0;
  }
  for (auto& [_, p] : dist) p /= total;
  c.table.tasks = c.tasks;
  c.table.stages.push_back({{}, {{c.objective.id, dist}}});
  return c;
}

/// sum over tasks of P(C|T,O) P(T|O), read straight from the table.
inline double brute_force_class(const ClassCase& c, const std::string& class_id) {
  const auto& dist = c.table.stages.front().by_objective.at(c.objective.id);
  double r = 0.0;
  for (const auto& task : c.tasks) r += *c.table.class_given_task.at({class_id, task.id, c.objective.id}) * dist.at(task.id);
  return r;
}

/// Total-probability expansion of element relevance over C / not C and h / not h.
/// The negation terms are supplied by the caller (and zeroed by the tests).
struct ElementExpansion {
  double r_class;           // P(C|O)
  double p_high;            // P(h|C,O)
  double p_elem_high;       // P(e|h,C,O)
  double p_elem_not_high;   // P(e|not h,C,O)
  double p_elem_not_class;  // P(e|not C,O)
};

inline double expand_element(const ElementExpansion& x) {
  const double given_class = x.p_elem_high * x.p_high + x.p_elem_not_high * (1.0 - x.p_high);
  return given_class * x.r_class + x.p_elem_not_class * (1.0 - x.r_class);
}

inline double shannon(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

// ---------------------------------------------------------------------------
// Planning

using State = std::set<Atom>;

/// Every action instance the domain admits over the problem's objects, found by
/// trying all argument tuples.
inline std::vector<GroundAction> enumerate_actions(const PlanningProblem& p) {
  std::vector<GroundAction> out;
  for (const auto& schema : p.domain.actions) {
    std::vector<std::string> args(schema.parameters.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == args.size()) {
        if (auto g = instantiate(p, schema.name, args)) out.push_back(std::move(*g));
        return;
      }
      for (const auto& o : p.objects) {
        if (!p.domain.is_subtype(o.type, schema.parameters[i].type)) continue;
        args[i] = o.name;
        rec(i + 1);
      }
    };
    rec(0);
  }
  return out;
}

inline bool satisfies(const State& s, const std::vector<Atom>& atoms) {
  for (const auto& a : atoms)
    if (!s.contains(a)) return false;
  return true;
}

/// Breadth-first search over explicit states. Returns the optimal plan length,
/// or nullopt when the goal is unreachable.
inline std::optional<std::size_t> shortest_plan(const PlanningProblem& p, std::size_t state_cap = 2'000'000) {
  const auto actions = enumerate_actions(p);
  std::map<State, std::size_t> depth;
  std::deque<State> frontier;
  depth[p.init] = 0;
  frontier.push_back(p.init);
  while (!frontier.empty()) {
    State s = std::move(frontier.front());
    frontier.pop_front();
    const auto d = depth.at(s);
    if (satisfies(s, p.goal)) return d;
    for (const auto& a : actions) {
      if (!satisfies(s, a.preconditions)) continue;
      State next = s;
      for (const auto& del : a.del_effects) next.erase(del);
      for (const auto& add : a.add_effects) next.insert(add);
      if (depth.emplace(next, d + 1).second) {
        if (depth.size() > state_cap) throw std::runtime_error("oracle state cap exceeded");
        frontier.push_back(std::move(next));
      }
    }
  }
  return std::nullopt;
}

struct SmallInstance {
  SceneRepresentation scene;
  std::vector<Atom> goal;
  IdSet goal_objects;
};

/// At most six scene objects: 2-5 items, maybe a container holding some of
/// them, random consistent stacks and a 1-3 atom goal (not always solvable).
inline SmallInstance random_small_instance(Rng& rng) {
  const bool with_container = rng.bernoulli(0.5);
  const auto n_items = static_cast<int>(rng.uniform_int(2, with_container ? 5 : 6));
  std::vector<Element> elements;
  AttributeClass items{"items", "items", "random", {}};
  AttributeClass boxes{"boxes", "boxes", "random", {}};
  std::map<std::string, std::string> home;
  for (int i = 0; i < n_items; ++i) {
    const auto id = "i" + std::to_string(i);
    elements.push_back({id, "item " + std::to_string(i), "items", {{"kind", "item"}}, std::nullopt});
    items.member_ids.push_back(id);
    home[id] = "table";
  }
  std::vector<SpatialConstraint> constraints;
  if (with_container) {
    elements.push_back({"box", "box", "boxes", {{"kind", "container"}}, std::nullopt});
    boxes.member_ids.push_back("box");
    for (int i = 0; i < n_items; ++i)
      if (rng.bernoulli(0.4)) {
        const auto id = "i" + std::to_string(i);
        home[id] = "box";
        constraints.push_back({"box", id, SupportRelation::Inside});
      }
  }
  std::map<std::string, std::string> support;  // top -> bottom
  std::map<std::string, std::string> load;     // bottom -> top
  const auto stacks = rng.uniform_int(0, 3);
  for (int k = 0; k < stacks; ++k) {
    const auto top = "i" + std::to_string(rng.uniform_int(0, n_items - 1));
    const auto bottom = "i" + std::to_string(rng.uniform_int(0, n_items - 1));
    if (top == bottom || home[top] != home[bottom] || support.contains(top) || load.contains(bottom)) continue;
    bool cycle = false;
    for (auto cur = bottom; support.contains(cur);) {
      cur = support[cur];
      if (cur == top) cycle = true;
    }
    if (cycle) continue;
    support[top] = bottom;
    load[bottom] = top;
    constraints.push_back({top, bottom, SupportRelation::OnTopOf});
  }
  std::vector<AttributeClass> classes{items};
  if (with_container) classes.push_back(boxes);

  SmallInstance out{build_scene(elements, classes, constraints), {}, {}};
  const auto n_goals = rng.uniform_int(1, 3);
  for (int g = 0; g < n_goals; ++g) {
    const auto id = "i" + std::to_string(rng.uniform_int(0, n_items - 1));
    Atom atom = rng.bernoulli(0.6) ? Atom{"served", {id}} : Atom{"at", {id, rng.bernoulli(0.7) ? home[id] : "table"}};
    if (std::find(out.goal.begin(), out.goal.end(), atom) != out.goal.end()) continue;
    out.goal.push_back(atom);
    out.goal_objects.insert(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenarios

/// Random snapshot sequence over a scene: people come and go, talk, move and
/// the objective is occasionally announced.
inline std::vector<FeatureSnapshot> random_scenario(Rng& rng, const SceneRepresentation& scene,
                                                    const std::vector<std::string>& objectives) {
  static const std::vector<std::string> kSentences{
      "Have you tried the cold brew coffee here?", "I would love some tea.", "Any snacks left?",
      "Nice weather today.", "Is there coffee?", "Maybe a muffin."};
  static const std::vector<std::string> kMotions{"grab_coffee", "wave", "point"};
  static const std::vector<std::string> kNames{"ana", "ben", "cy", "dee"};
  std::vector<FeatureSnapshot> out;
  std::vector<std::string> present;
  const auto all_ids = scene.element_ids();
  const std::vector<ElementId> ids(all_ids.begin(), all_ids.end());
  const auto length = rng.uniform_int(4, 20);
  std::int64_t tick = 0;
  for (int i = 0; i < length; ++i) {
    FeatureSnapshot s;
    tick += rng.uniform_int(1, 3);
    s.tick = tick;
    if (rng.bernoulli(0.3) && present.size() < kNames.size()) {
      for (const auto& n : kNames)
        if (std::find(present.begin(), present.end(), n) == present.end()) {
          present.push_back(n);
          break;
        }
    } else if (rng.bernoulli(0.1) && !present.empty()) {
      present.erase(present.begin());
    }
    s.humans = present;
    if (rng.bernoulli(0.25)) s.transcripts.push_back(kSentences[rng.uniform_int(0, kSentences.size() - 1)]);
    if (rng.bernoulli(0.15)) s.motions.push_back(kMotions[rng.uniform_int(0, kMotions.size() - 1)]);
    if (i == 0 || rng.bernoulli(0.1)) s.objective = objectives[rng.uniform_int(0, objectives.size() - 1)];
    if (rng.bernoulli(0.2)) {
      for (const auto& id : ids)
        if (rng.bernoulli(0.8)) s.elements.push_back(id);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace oracle
