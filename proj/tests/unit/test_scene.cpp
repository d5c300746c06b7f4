#include <doctest.h>

#include "helpers.hpp"
#include "relevance/rng.hpp"
#include "relevance/scene.hpp"

using namespace relevance;

namespace {

Element item(const std::string& id, const std::string& cls = "c") { return {id, id, cls, {}, std::nullopt}; }

SceneRepresentation chain_scene() {
  // a on b on c; box holds d.
  return build_scene({item("a"), item("b"), item("c"), item("d"), item("box")},
                     {{"c", "stuff", "any", {"a", "b", "c", "d", "box"}}},
                     {{"a", "b", SupportRelation::OnTopOf},
                      {"b", "c", SupportRelation::OnTopOf},
                      {"box", "d", SupportRelation::Inside}});
}

}  // namespace

TEST_SUITE("scene") {
  TEST_CASE("valid scene exposes lookups") {
    const auto scene = chain_scene();
    CHECK(scene.elements().size() == 5);
    CHECK(scene.contains("a"));
    CHECK_FALSE(scene.contains("z"));
    CHECK(scene.element("d").class_id == "c");
    CHECK(scene.find_element("z") == nullptr);
    CHECK_ERROR_KIND(scene.element("z"), ErrorKind::UnknownElementId);
    CHECK_ERROR_KIND(scene.attribute_class("nope"), ErrorKind::UnknownClass);
  }

  TEST_CASE("type falls back to name and kind marks containers") {
    Element e{"cup_1", "plastic cup", "c", {}, std::nullopt};
    CHECK(e.type() == "plastic cup");
    e.attributes["type"] = "cup";
    CHECK(e.type() == "cup");
    CHECK_FALSE(e.is_container());
    e.attributes["kind"] = "container";
    CHECK(e.is_container());
  }

  TEST_CASE("build_scene rejects malformed input") {
    const AttributeClass c{"c", "c", "", {"a", "b"}};
    CHECK_ERROR_KIND(build_scene({item("a"), item("a")}, {c}, {}), ErrorKind::DuplicateId);
    CHECK_ERROR_KIND(build_scene({item("a")}, {c, c}, {}), ErrorKind::DuplicateId);
    CHECK_ERROR_KIND(build_scene({item("a", "missing")}, {{"c", "c", "", {}}}, {}), ErrorKind::UnknownClassReference);
    CHECK_ERROR_KIND(build_scene({item("a")}, {{"c", "c", "", {"a", "ghost"}}}, {}), ErrorKind::UnknownElementId);
    CHECK_ERROR_KIND(build_scene({item("a")}, {{"c", "c", "", {}}}, {}), ErrorKind::UnclassifiedElement);
    CHECK_ERROR_KIND(build_scene({item("a"), item("b", "d")}, {{"c", "c", "", {"a", "b"}}, {"d", "d", "", {"b"}}}, {}),
                     ErrorKind::AmbiguousClassMembership);
    CHECK_ERROR_KIND(build_scene({item("a"), item("b")}, {c}, {{"a", "ghost", SupportRelation::OnTopOf}}),
                     ErrorKind::UnknownElementId);
    CHECK_ERROR_KIND(build_scene({item("a"), item("b")}, {c}, {{"a", "a", SupportRelation::OnTopOf}}),
                     ErrorKind::CyclicSupport);
    CHECK_ERROR_KIND(build_scene({item("a"), item("b")}, {c},
                                 {{"a", "b", SupportRelation::OnTopOf}, {"b", "a", SupportRelation::OnTopOf}}),
                     ErrorKind::CyclicSupport);
  }

  TEST_CASE("closure adds transitive blockers only") {
    const auto scene = chain_scene();
    CHECK(constraint_closure(scene, {"c"}) == IdSet{"a", "b", "c"});
    CHECK(constraint_closure(scene, {"a"}) == IdSet{"a"});
    CHECK(constraint_closure(scene, {"d"}) == IdSet{"box", "d"});
    CHECK(constraint_closure(scene, {}).empty());
    CHECK_ERROR_KIND(constraint_closure(scene, {"ghost"}), ErrorKind::UnknownElementId);
  }

  TEST_CASE("closure equals the naive fixed point on random acyclic graphs") {
    Rng rng(5);
    for (int round = 0; round < 300; ++round) {
      const int n = static_cast<int>(rng.uniform_int(2, 12));
      std::vector<SpatialConstraint> edges;
      // Edges only go from lower to higher index, so the graph is acyclic.
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (rng.bernoulli(0.15)) edges.push_back({std::to_string(i), std::to_string(j), SupportRelation::OnTopOf});
      IdSet seed;
      for (int i = 0; i < n; ++i)
        if (rng.bernoulli(0.2)) seed.insert(std::to_string(i));

      IdSet expected = seed;
      for (bool grew = true; grew;) {
        grew = false;
        for (const auto& e : edges)
          if (expected.contains(e.blocked_id) && expected.insert(e.blocker_id).second) grew = true;
      }
      const auto closed = constraint_closure(seed, edges);
      CHECK(closed == expected);
      CHECK(constraint_closure(closed, edges) == closed);
    }
  }

  TEST_CASE("json round trip preserves the scene") {
    auto scene = chain_scene();
    const auto doc = scene_to_json(scene);
    CHECK(scene_from_json(doc) == scene);
    CHECK(doc.at("constraints").at(2).at("relation") == "inside");
    CHECK_THROWS_AS(scene_from_json(nlohmann::json::parse(R"({"elements": 3})")), Error);
  }

  TEST_CASE("distance") {
    CHECK(Position{0, 0, 0}.distance_to({3, 4, 0}) == doctest::Approx(5.0));
  }
}
