#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace relevance {

using ElementId = std::string;
using ClassId = std::string;
using IdSet = std::set<std::string>;

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double distance_to(const Position& other) const;
  friend bool operator==(const Position&, const Position&) = default;
};

/// A perceived scene element. High-level attributes describe what the element
/// is (type, kind); the position is its low-level, spatial attribute.
struct Element {
  ElementId id;
  std::string name;
  ClassId class_id;
  std::map<std::string, std::string> attributes;
  std::optional<Position> position;

  /// The high-level type shared by duplicates ("plastic cup"); falls back to name.
  const std::string& type() const;
  bool is_container() const;

  friend bool operator==(const Element&, const Element&) = default;
};

struct AttributeClass {
  ClassId id;
  std::string name;
  std::string criterion;
  std::vector<ElementId> member_ids;

  friend bool operator==(const AttributeClass&, const AttributeClass&) = default;
};

enum class SupportRelation { OnTopOf, Inside };

/// `blocker_id` must be moved (or opened) before `blocked_id` is reachable.
struct SpatialConstraint {
  ElementId blocker_id;
  ElementId blocked_id;
  SupportRelation relation = SupportRelation::OnTopOf;

  friend bool operator==(const SpatialConstraint&, const SpatialConstraint&) = default;
};

struct Objective {
  std::string id;
  std::string text;
};

struct TaskSpec {
  std::string id;
  std::string description;
};

struct Preference {
  std::string human_id;
  std::string element_name;
  double weight = 0.0;
};

class SceneRepresentation {
 public:
  SceneRepresentation() = default;

  const std::vector<AttributeClass>& classes() const { return classes_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<SpatialConstraint>& constraints() const { return constraints_; }

  bool contains(const ElementId& id) const { return element_index_.contains(id); }
  const Element* find_element(const ElementId& id) const;
  const Element& element(const ElementId& id) const;
  const AttributeClass* find_class(const ClassId& id) const;
  const AttributeClass& attribute_class(const ClassId& id) const;

  IdSet element_ids() const;

  friend bool operator==(const SceneRepresentation& a, const SceneRepresentation& b) {
    return a.classes_ == b.classes_ && a.elements_ == b.elements_ &&
           a.constraints_ == b.constraints_;
  }

 private:
  friend SceneRepresentation build_scene(std::vector<Element>, std::vector<AttributeClass>,
                                         std::vector<SpatialConstraint>);

  std::vector<AttributeClass> classes_;
  std::vector<Element> elements_;
  std::vector<SpatialConstraint> constraints_;
  std::unordered_map<ElementId, std::size_t> element_index_;
  std::unordered_map<ClassId, std::size_t> class_index_;
};

/// Validates and assembles a scene. Throws Error with DuplicateId,
/// UnknownClassReference, UnknownElementId, AmbiguousClassMembership,
/// UnclassifiedElement or CyclicSupport.
SceneRepresentation build_scene(std::vector<Element> elements, std::vector<AttributeClass> classes,
                                std::vector<SpatialConstraint> constraints);

/// Least superset of `relevant` closed under "x kept and y blocks x => y kept".
IdSet constraint_closure(const IdSet& relevant, std::span<const SpatialConstraint> constraints);

/// Same, but first checks that every id exists in the scene (UnknownElementId).
IdSet constraint_closure(const SceneRepresentation& scene, const IdSet& relevant);

// JSON scene documents: {"classes": [...], "elements": [...], "constraints": [...]}.
nlohmann::json scene_to_json(const SceneRepresentation& scene);
SceneRepresentation scene_from_json(const nlohmann::json& doc);
SceneRepresentation load_scene(const std::string& path);
void save_scene(const SceneRepresentation& scene, const std::string& path);

std::string_view to_string(SupportRelation relation);

}  // namespace relevance
