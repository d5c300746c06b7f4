#include <algorithm>

#include <doctest.h>

#include "helpers.hpp"
#include "relevance/planner.hpp"
#include "relevance/search.hpp"
#include "support/oracles.hpp"

using namespace relevance;

namespace {

Element item(const std::string& id, const std::string& kind = "item") {
  return {id, id, kind == "container" ? "boxes" : "things", {{"kind", kind}}, std::nullopt};
}

// a on b on c on the table; d inside the fridge.
SceneRepresentation kitchen() {
  return build_scene({item("a"), item("b"), item("c"), item("d"), item("fridge", "container")},
                     {{"things", "things", "", {"a", "b", "c", "d"}}, {"boxes", "boxes", "", {"fridge"}}},
                     {{"a", "b", SupportRelation::OnTopOf},
                      {"b", "c", SupportRelation::OnTopOf},
                      {"fridge", "d", SupportRelation::Inside}});
}

bool has(const PlanningProblem& p, const Atom& a) { return p.init.contains(a); }

}  // namespace

TEST_SUITE("planner") {
  TEST_CASE("domain shape") {
    const auto& d = serve_domain();
    CHECK(d.actions.size() == 5);
    CHECK(d.find_action("move-off") != nullptr);
    CHECK(d.find_action("fly") == nullptr);
    CHECK(d.is_subtype("container", "place"));
    CHECK(d.is_subtype("container", "object"));
    CHECK(d.is_subtype("item", "item"));
    CHECK_FALSE(d.is_subtype("item", "place"));
    CHECK(to_string(Atom{"at", {"a", "table"}}) == "(at a table)");
    CHECK(to_string(Atom{"handempty", {}}) == "(handempty)");
  }

  TEST_CASE("compile encodes stacks, containers and delivery levels") {
    const auto p = compile(kitchen(), {{"served", {"c"}}, {"served", {"d"}}, {"at", {"a", "table"}}});
    CHECK(has(p, {"on", {"a", "b"}}));
    CHECK(has(p, {"on", {"b", "c"}}));
    CHECK(has(p, {"clear", {"a"}}));
    CHECK_FALSE(has(p, {"clear", {"b"}}));
    CHECK(has(p, {"loose", {"c"}}));
    CHECK_FALSE(has(p, {"loose", {"a"}}));
    CHECK(has(p, {"home", {"d", "fridge"}}));
    CHECK(has(p, {"at", {"d", "fridge"}}));
    CHECK(has(p, {"closed", {"fridge"}}));
    CHECK_FALSE(has(p, {"accessible", {"fridge"}}));
    CHECK(has(p, {"deliveries-left", {"level-2"}}));
    CHECK(has(p, {"succ", {"level-1", "level-2"}}));
    CHECK(p.find_object("level-3") == nullptr);
    CHECK(compile(kitchen(), {{"served", {"c"}}}, 2).find_object("level-3") != nullptr);
  }

  TEST_CASE("compile rejects inconsistent scenes and goals") {
    auto scene = [](std::vector<Element> es, std::vector<SpatialConstraint> cs) {
      std::vector<std::string> things, boxes;
      for (const auto& e : es) (e.class_id == "boxes" ? boxes : things).push_back(e.id);
      return build_scene(es, {{"things", "things", "", things}, {"boxes", "boxes", "", boxes}}, cs);
    };
    const auto inside = SupportRelation::Inside;
    const auto on = SupportRelation::OnTopOf;
    CHECK_ERROR_KIND(compile(scene({item("a"), item("b")}, {{"a", "b", inside}}), {}), ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(scene({item("a"), item("x", "container"), item("y", "container")},
                                   {{"x", "a", inside}, {"y", "a", inside}}),
                             {}),
                     ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(scene({item("a"), item("x", "container")}, {{"x", "a", on}}), {}),
                     ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(scene({item("a"), item("b"), item("c")}, {{"a", "b", on}, {"a", "c", on}}), {}),
                     ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(scene({item("a"), item("b"), item("c")}, {{"a", "c", on}, {"b", "c", on}}), {}),
                     ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(scene({item("a"), item("b"), item("x", "container")}, {{"x", "a", inside}, {"a", "b", on}}),
                             {}),
                     ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(scene({item("tray")}, {}), {}), ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(kitchen(), {{"served", {"a", "b"}}}), ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(kitchen(), {{"served", {"ghost"}}}), ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(kitchen(), {{"served", {"fridge"}}}), ErrorKind::InconsistentInstance);
    CHECK_ERROR_KIND(compile(kitchen(), {{"levitating", {"a"}}}), ErrorKind::InconsistentInstance);
  }

  TEST_CASE("instantiate checks names, arity and types") {
    const auto p = compile(kitchen(), {{"served", {"c"}}});
    const auto pick = instantiate(p, "pick", {"a", "table"});
    REQUIRE(pick.has_value());
    CHECK(pick->to_string() == "(pick a table)");
    CHECK(std::count(pick->add_effects.begin(), pick->add_effects.end(), Atom{"holding", {"a"}}) == 1);
    CHECK_FALSE(instantiate(p, "pick", {"a"}).has_value());
    CHECK_FALSE(instantiate(p, "pick", {"table", "a"}).has_value());
    CHECK_FALSE(instantiate(p, "pick", {"ghost", "table"}).has_value());
    CHECK_FALSE(instantiate(p, "juggle", {"a", "table"}).has_value());
    CHECK(instantiate(p, "open", {"fridge"}).has_value());
    CHECK_FALSE(instantiate(p, "open", {"a"}).has_value());
  }

  TEST_CASE("grounding keeps every action that is ever applicable") {
    Rng rng(3);
    for (int i = 0; i < 40; ++i) {
      const auto inst = oracle::random_small_instance(rng);
      const auto p = compile(inst.scene, inst.goal);
      std::set<std::string> grounded;
      for (const auto& a : ground(p)) grounded.insert(a.to_string());
      std::set<std::string> all;
      for (const auto& a : oracle::enumerate_actions(p)) all.insert(a.to_string());
      CHECK(std::includes(all.begin(), all.end(), grounded.begin(), grounded.end()));

      // Walk the reachable space and check each applicable action was grounded.
      const auto actions = oracle::enumerate_actions(p);
      std::set<oracle::State> seen{p.init};
      std::vector<oracle::State> stack{p.init};
      while (!stack.empty()) {
        const auto s = stack.back();
        stack.pop_back();
        for (const auto& a : actions) {
          if (!oracle::satisfies(s, a.preconditions)) continue;
          CHECK(grounded.contains(a.to_string()));
          auto next = s;
          for (const auto& d : a.del_effects) next.erase(d);
          for (const auto& x : a.add_effects) next.insert(x);
          if (seen.insert(next).second) stack.push_back(next);
        }
      }
    }
  }

  TEST_CASE("prune repairs support atoms and refuses to drop goals") {
    const auto p = compile(kitchen(), {{"served", {"b"}}});
    const auto q = prune(p, {"b"});
    CHECK(q.find_object("a") == nullptr);
    CHECK(q.find_object("fridge") == nullptr);
    CHECK(q.find_object("table") != nullptr);
    CHECK(q.find_object("level-1") != nullptr);
    CHECK(has(q, {"clear", {"b"}}));
    CHECK(has(q, {"loose", {"b"}}));
    for (const auto& a : q.init)
      for (const auto& arg : a.args) CHECK(q.find_object(arg) != nullptr);
    CHECK(solve(q, 10.0).status == SolveStatus::Solved);
    CHECK_ERROR_KIND(prune(p, {"a"}), ErrorKind::GoalPruned);
  }

  TEST_CASE("validate accepts solver plans and pinpoints broken ones") {
    const auto p = compile(kitchen(), {{"served", {"c"}}, {"served", {"d"}}});
    const auto r = solve(p, 10.0);
    REQUIRE(r.status == SolveStatus::Solved);
    CHECK(validate(p, *r.plan).accepted);

    auto broken = *r.plan;
    broken.steps.erase(broken.steps.begin());
    const auto v = validate(p, broken);
    CHECK_FALSE(v.accepted);
    CHECK(v.failed_step == std::optional<std::size_t>{0});

    auto short_plan = *r.plan;
    short_plan.steps.pop_back();
    const auto w = validate(p, short_plan);
    CHECK_FALSE(w.accepted);
    CHECK_FALSE(w.failed_step.has_value());
    CHECK(w.reason.find("goal") != std::string::npos);

    Plan bogus{{GroundAction{"teleport", {"a"}, {}, {}, {}}}};
    CHECK_FALSE(validate(p, bogus).accepted);
    // Effects are re-derived from the domain, not trusted from the plan.
    Plan forged{{GroundAction{"open", {"fridge"}, {}, {{"served", {"c"}}, {"served", {"d"}}}, {}}}};
    CHECK_FALSE(validate(p, forged).accepted);
  }
}
