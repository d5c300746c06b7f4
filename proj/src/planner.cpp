#include "relevance/planner.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "relevance/error.hpp"

namespace relevance {

std::string to_string(const Atom& atom) {
  std::string out = "(" + atom.predicate;
  for (const auto& a : atom.args) out += " " + a;
  return out + ")";
}

std::string GroundAction::to_string() const {
  std::string out = "(" + name;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

bool PlanningDomain::is_subtype(const std::string& type, const std::string& ancestor) const {
  std::string current = type;
  for (std::size_t guard = 0; guard <= types.size(); ++guard) {
    if (current == ancestor) return true;
    auto it = std::find_if(types.begin(), types.end(), [&](const TypedName& t) { return t.name == current; });
    if (it == types.end()) return ancestor == "object";
    current = it->type;
  }
  return false;
}

const ActionSchema* PlanningDomain::find_action(const std::string& action) const {
  for (const auto& a : actions)
    if (a.name == action) return &a;
  return nullptr;
}

const TypedName* PlanningProblem::find_object(const std::string& object) const {
  for (const auto& o : objects)
    if (o.name == object) return &o;
  return nullptr;
}

const PlanningDomain& serve_domain() {
  static const PlanningDomain domain = [] {
    PlanningDomain d;
    d.name = "serve";
    d.types = {{"item", "object"},    {"place", "object"},     {"level", "object"},
               {"surface", "place"},  {"container", "place"}, {"serving-area", "place"}};
    d.predicates = {
        {"at", {{"?o", "item"}, {"?l", "place"}}},
        {"on", {{"?o", "item"}, {"?u", "item"}}},
        {"clear", {{"?o", "item"}}},
        {"loose", {{"?o", "item"}}},
        {"holding", {{"?o", "item"}}},
        {"handempty", {}},
        {"accessible", {{"?l", "place"}}},
        {"closed", {{"?c", "container"}}},
        {"home", {{"?o", "item"}, {"?l", "place"}}},
        {"served", {{"?o", "item"}}},
        {"deliveries-left", {{"?n", "level"}}},
        {"succ", {{"?m", "level"}, {"?n", "level"}}},
    };
    d.actions = {
        {"pick",
         {{"?o", "item"}, {"?l", "place"}},
         {{"at", {"?o", "?l"}}, {"clear", {"?o"}}, {"loose", {"?o"}}, {"handempty", {}}, {"accessible", {"?l"}}},
         {{"holding", {"?o"}}},
         {{"at", {"?o", "?l"}}, {"handempty", {}}}},
        {"move-off",
         {{"?o", "item"}, {"?u", "item"}, {"?l", "place"}},
         {{"on", {"?o", "?u"}}, {"clear", {"?o"}}, {"handempty", {}}, {"at", {"?o", "?l"}}, {"accessible", {"?l"}}},
         {{"holding", {"?o"}}, {"clear", {"?u"}}, {"loose", {"?o"}}},
         {{"on", {"?o", "?u"}}, {"at", {"?o", "?l"}}, {"handempty", {}}}},
        {"place",
         {{"?o", "item"}, {"?l", "place"}},
         {{"holding", {"?o"}}, {"home", {"?o", "?l"}}, {"accessible", {"?l"}}},
         {{"at", {"?o", "?l"}}, {"handempty", {}}},
         {{"holding", {"?o"}}}},
        {"serve",
         {{"?o", "item"}, {"?s", "serving-area"}, {"?n", "level"}, {"?m", "level"}},
         {{"holding", {"?o"}}, {"deliveries-left", {"?n"}}, {"succ", {"?m", "?n"}}},
         {{"served", {"?o"}}, {"at", {"?o", "?s"}}, {"handempty", {}}, {"deliveries-left", {"?m"}}},
         {{"holding", {"?o"}}, {"deliveries-left", {"?n"}}}},
        {"open",
         {{"?c", "container"}},
         {{"closed", {"?c"}}, {"handempty", {}}},
         {{"accessible", {"?c"}}},
         {{"closed", {"?c"}}}},
    };
    return d;
  }();
  return domain;
}

namespace {

Atom substitute(const Atom& lifted, const std::map<std::string, std::string>& binding) {
  Atom out{lifted.predicate, {}};
  out.args.reserve(lifted.args.size());
  for (const auto& a : lifted.args) {
    auto it = binding.find(a);
    out.args.push_back(it == binding.end() ? a : it->second);
  }
  return out;
}

GroundAction make_ground(const ActionSchema& schema, const std::vector<std::string>& args) {
  std::map<std::string, std::string> binding;
  for (std::size_t i = 0; i < args.size(); ++i) binding[schema.parameters[i].name] = args[i];
  GroundAction g{schema.name, args, {}, {}, {}};
  for (const auto& a : schema.preconditions) g.preconditions.push_back(substitute(a, binding));
  for (const auto& a : schema.add_effects) g.add_effects.push_back(substitute(a, binding));
  for (const auto& a : schema.del_effects) g.del_effects.push_back(substitute(a, binding));
  return g;
}

std::set<std::string> never_added(const PlanningDomain& domain) {
  std::set<std::string> out;
  for (const auto& [p, _] : domain.predicates) out.insert(p);
  for (const auto& a : domain.actions)
    for (const auto& e : a.add_effects) out.erase(e.predicate);
  return out;
}

}  // namespace

std::optional<GroundAction> instantiate(const PlanningProblem& problem, const std::string& name,
                                        const std::vector<std::string>& args) {
  const auto* schema = problem.domain.find_action(name);
  if (!schema || schema->parameters.size() != args.size()) return std::nullopt;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto* obj = problem.find_object(args[i]);
    if (!obj || !problem.domain.is_subtype(obj->type, schema->parameters[i].type)) return std::nullopt;
  }
  return make_ground(*schema, args);
}

std::vector<GroundAction> ground(const PlanningProblem& problem) {
  const auto& domain = problem.domain;
  const auto fixed = never_added(domain);
  std::vector<GroundAction> candidates;

  for (const auto& schema : domain.actions) {
    const std::size_t n = schema.parameters.size();
    std::vector<std::vector<std::string>> domains(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& o : problem.objects)
        if (domain.is_subtype(o.type, schema.parameters[i].type)) domains[i].push_back(o.name);

    // Preconditions over never-added predicates, checked once their last
    // variable is bound.
    std::vector<std::vector<const Atom*>> checks(n + 1);
    for (const auto& pre : schema.preconditions) {
      if (!fixed.contains(pre.predicate)) continue;
      std::size_t last = 0;
      for (const auto& a : pre.args)
        for (std::size_t i = 0; i < n; ++i)
          if (schema.parameters[i].name == a) last = std::max(last, i + 1);
      checks[last].push_back(&pre);
    }

    std::map<std::string, std::string> binding;
    std::vector<std::string> args(n);
    auto holds = [&](std::size_t level) {
      for (const auto* pre : checks[level])
        if (!problem.init.contains(substitute(*pre, binding))) return false;
      return true;
    };
    auto recurse = [&](auto&& self, std::size_t i) -> void {
      if (i == n) {
        candidates.push_back(make_ground(schema, args));
        return;
      }
      for (const auto& obj : domains[i]) {
        args[i] = obj;
        binding[schema.parameters[i].name] = obj;
        if (holds(i + 1)) self(self, i + 1);
      }
      binding.erase(schema.parameters[i].name);
    };
    if (holds(0)) recurse(recurse, 0);
  }

  // Delete-relaxed reachability.
  std::set<Atom> reached = problem.init;
  std::vector<char> enabled(candidates.size(), 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (enabled[i]) continue;
      const auto& pre = candidates[i].preconditions;
      if (!std::all_of(pre.begin(), pre.end(), [&](const Atom& a) { return reached.contains(a); })) continue;
      enabled[i] = 1;
      changed = true;
      for (const auto& e : candidates[i].add_effects) reached.insert(e);
    }
  }
  std::vector<GroundAction> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (enabled[i]) out.push_back(std::move(candidates[i]));
  return out;
}

PlanningProblem compile(const SceneRepresentation& scene, const std::vector<Atom>& goal, int spare_deliveries,
                        std::string name) {
  auto inconsistent = [](const std::string& msg) { return Error(ErrorKind::InconsistentInstance, msg); };

  std::map<ElementId, std::string> home;
  std::map<ElementId, ElementId> support;  // top -> bottom
  std::map<ElementId, ElementId> load;     // bottom -> top
  for (const auto& c : scene.constraints()) {
    const auto& blocker = scene.element(c.blocker_id);
    const auto& blocked = scene.element(c.blocked_id);
    if (c.relation == SupportRelation::Inside) {
      if (!blocker.is_container() || blocked.is_container())
        throw inconsistent("'" + blocked.id + "' inside '" + blocker.id + "' needs an item inside a container");
      if (!home.emplace(blocked.id, blocker.id).second)
        throw inconsistent("'" + blocked.id + "' is inside two containers");
    } else {
      if (blocker.is_container() || blocked.is_container())
        throw inconsistent("containers cannot be stacked: " + blocker.id + " on " + blocked.id);
      if (!support.emplace(blocker.id, blocked.id).second)
        throw inconsistent("'" + blocker.id + "' rests on two objects");
      if (!load.emplace(blocked.id, blocker.id).second)
        throw inconsistent("two objects rest on '" + blocked.id + "'");
    }
  }
  auto home_of = [&](const ElementId& id) {
    auto it = home.find(id);
    return it == home.end() ? std::string("table") : it->second;
  };
  for (const auto& [top, bottom] : support)
    if (home_of(top) != home_of(bottom))
      throw inconsistent("'" + top + "' and '" + bottom + "' are stacked across locations");

  PlanningProblem p;
  p.name = std::move(name);
  p.domain = serve_domain();
  p.objects.push_back({"table", "surface"});
  p.objects.push_back({"tray", "serving-area"});
  for (const auto& e : scene.elements()) {
    if (e.id == "table" || e.id == "tray" || e.id.rfind("level-", 0) == 0)
      throw inconsistent("element id '" + e.id + "' clashes with a reserved planning object");
    p.objects.push_back({e.id, e.is_container() ? "container" : "item"});
  }

  const auto served_goals = std::count_if(goal.begin(), goal.end(), [](const Atom& a) { return a.predicate == "served"; });
  const auto levels = static_cast<int>(served_goals) + std::max(0, spare_deliveries);
  for (int i = 0; i <= levels; ++i) p.objects.push_back({"level-" + std::to_string(i), "level"});
  for (int i = 1; i <= levels; ++i)
    p.init.insert({"succ", {"level-" + std::to_string(i - 1), "level-" + std::to_string(i)}});
  p.init.insert({"deliveries-left", {"level-" + std::to_string(levels)}});

  p.init.insert({"handempty", {}});
  p.init.insert({"accessible", {"table"}});
  p.init.insert({"accessible", {"tray"}});
  for (const auto& e : scene.elements()) {
    if (e.is_container()) {
      p.init.insert({"closed", {e.id}});
      continue;
    }
    const auto h = home_of(e.id);
    p.init.insert({"at", {e.id, h}});
    p.init.insert({"home", {e.id, h}});
    if (!load.contains(e.id)) p.init.insert({"clear", {e.id}});
    if (!support.contains(e.id)) p.init.insert({"loose", {e.id}});
  }
  for (const auto& [top, bottom] : support) p.init.insert({"on", {top, bottom}});

  for (const auto& g : goal) {
    auto pred = std::find_if(p.domain.predicates.begin(), p.domain.predicates.end(),
                             [&](const auto& entry) { return entry.first == g.predicate; });
    if (pred == p.domain.predicates.end() || pred->second.size() != g.args.size())
      throw inconsistent("malformed goal atom " + to_string(g));
    for (std::size_t i = 0; i < g.args.size(); ++i) {
      const auto* obj = p.find_object(g.args[i]);
      if (!obj || !p.domain.is_subtype(obj->type, pred->second[i].type))
        throw inconsistent("goal atom " + to_string(g) + " references an unknown or ill-typed object");
    }
    p.goal.push_back(g);
  }
  return p;
}

PlanningProblem compile(const ProblemInstance& instance) {
  return compile(instance.scene, instance.planning_goal, instance.difficulty == Difficulty::Hard ? 1 : 0,
                 instance.case_id());
}

PlanningProblem prune(const PlanningProblem& problem, const IdSet& keep) {
  auto prunable = [&](const TypedName& o) {
    return problem.domain.is_subtype(o.type, "item") || problem.domain.is_subtype(o.type, "container");
  };
  std::unordered_set<std::string> removed;
  PlanningProblem out;
  out.name = problem.name;
  out.domain = problem.domain;
  for (const auto& o : problem.objects) {
    if (prunable(o) && !keep.contains(o.name))
      removed.insert(o.name);
    else
      out.objects.push_back(o);
  }
  auto mentions_removed = [&](const Atom& a) {
    return std::any_of(a.args.begin(), a.args.end(), [&](const std::string& x) { return removed.contains(x); });
  };
  for (const auto& g : problem.goal)
    if (mentions_removed(g)) throw Error(ErrorKind::GoalPruned, "goal atom " + to_string(g) + " was pruned");
  out.goal = problem.goal;

  for (const auto& a : problem.init) {
    if (!mentions_removed(a)) {
      out.init.insert(a);
      continue;
    }
    if (a.predicate == "on") {
      const auto& top = a.args[0];
      const auto& bottom = a.args[1];
      if (removed.contains(top) && !removed.contains(bottom)) out.init.insert({"clear", {bottom}});
      if (removed.contains(bottom) && !removed.contains(top)) out.init.insert({"loose", {top}});
    }
  }
  return out;
}

ValidationResult validate(const PlanningProblem& problem, const Plan& plan) {
  std::set<Atom> state = problem.init;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const auto g = instantiate(problem, step.name, step.args);
    if (!g) return {false, i, "step " + step.to_string() + " is not an action instance of the domain"};
    for (const auto& pre : g->preconditions)
      if (!state.contains(pre)) return {false, i, "precondition " + to_string(pre) + " of " + g->to_string() + " fails"};
    for (const auto& d : g->del_effects) state.erase(d);
    for (const auto& a : g->add_effects) state.insert(a);
  }
  for (const auto& goal : problem.goal)
    if (!state.contains(goal)) return {false, std::nullopt, "goal " + to_string(goal) + " not reached"};
  return {true, std::nullopt, ""};
}

}  // namespace relevance
