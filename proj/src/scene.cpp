#include "relevance/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "relevance/error.hpp"

namespace relevance {

double Position::distance_to(const Position& other) const {
  return std::sqrt((x - other.x) * (x - other.x) + (y - other.y) * (y - other.y) +
                   (z - other.z) * (z - other.z));
}

const std::string& Element::type() const {
  auto it = attributes.find("type");
  return it == attributes.end() ? name : it->second;
}

bool Element::is_container() const {
  auto it = attributes.find("kind");
  return it != attributes.end() && it->second == "container";
}

const Element* SceneRepresentation::find_element(const ElementId& id) const {
  auto it = element_index_.find(id);
  return it == element_index_.end() ? nullptr : &elements_[it->second];
}

const Element& SceneRepresentation::element(const ElementId& id) const {
  if (const auto* e = find_element(id)) return *e;
  throw Error(ErrorKind::UnknownElementId, "unknown element '" + id + "'");
}

const AttributeClass* SceneRepresentation::find_class(const ClassId& id) const {
  auto it = class_index_.find(id);
  return it == class_index_.end() ? nullptr : &classes_[it->second];
}

const AttributeClass& SceneRepresentation::attribute_class(const ClassId& id) const {
  if (const auto* c = find_class(id)) return *c;
  throw Error(ErrorKind::UnknownClass, "unknown class '" + id + "'");
}

IdSet SceneRepresentation::element_ids() const {
  IdSet ids;
  for (const auto& e : elements_) ids.insert(e.id);
  return ids;
}

namespace {

// Depth-first search for a cycle in the blocker -> blocked graph.
bool has_cycle(const std::vector<SpatialConstraint>& constraints) {
  std::map<ElementId, std::vector<ElementId>> edges;
  for (const auto& c : constraints) edges[c.blocker_id].push_back(c.blocked_id);

  enum class Mark { Unvisited, Active, Done };
  std::map<ElementId, Mark> marks;
  std::vector<std::pair<ElementId, std::size_t>> stack;
  for (const auto& [start, _] : edges) {
    if (marks[start] != Mark::Unvisited) continue;
    stack.emplace_back(start, 0);
    marks[start] = Mark::Active;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& out = edges[node];
      if (next == out.size()) {
        marks[node] = Mark::Done;
        stack.pop_back();
        continue;
      }
      const ElementId child = out[next++];
      if (marks[child] == Mark::Active) return true;
      if (marks[child] == Mark::Unvisited) {
        marks[child] = Mark::Active;
        stack.emplace_back(child, 0);
      }
    }
  }
  return false;
}

}  // namespace

SceneRepresentation build_scene(std::vector<Element> elements, std::vector<AttributeClass> classes,
                                std::vector<SpatialConstraint> constraints) {
  SceneRepresentation scene;

  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!scene.class_index_.emplace(classes[i].id, i).second)
      throw Error(ErrorKind::DuplicateId, "duplicate class id '" + classes[i].id + "'");
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (!scene.element_index_.emplace(e.id, i).second)
      throw Error(ErrorKind::DuplicateId, "duplicate element id '" + e.id + "'");
    if (!scene.class_index_.contains(e.class_id))
      throw Error(ErrorKind::UnknownClassReference,
                  "element '" + e.id + "' references missing class '" + e.class_id + "'");
  }

  std::unordered_set<ElementId> classified;
  for (const auto& c : classes) {
    for (const auto& member : c.member_ids) {
      auto it = scene.element_index_.find(member);
      if (it == scene.element_index_.end())
        throw Error(ErrorKind::UnknownElementId,
                    "class '" + c.id + "' lists unknown element '" + member + "'");
      if (elements[it->second].class_id != c.id || !classified.insert(member).second)
        throw Error(ErrorKind::AmbiguousClassMembership,
                    "element '" + member + "' is claimed by more than one class");
    }
  }
  for (const auto& e : elements) {
    if (!classified.contains(e.id))
      throw Error(ErrorKind::UnclassifiedElement,
                  "element '" + e.id + "' is not listed by its class '" + e.class_id + "'");
  }

  for (const auto& c : constraints) {
    for (const auto* id : {&c.blocker_id, &c.blocked_id}) {
      if (!scene.element_index_.contains(*id))
        throw Error(ErrorKind::UnknownElementId, "constraint references unknown element '" + *id + "'");
    }
    if (c.blocker_id == c.blocked_id)
      throw Error(ErrorKind::CyclicSupport, "element '" + c.blocker_id + "' supports itself");
  }
  if (has_cycle(constraints)) throw Error(ErrorKind::CyclicSupport, "support relation has a cycle");

  scene.classes_ = std::move(classes);
  scene.elements_ = std::move(elements);
  scene.constraints_ = std::move(constraints);
  return scene;
}

IdSet constraint_closure(const IdSet& relevant, std::span<const SpatialConstraint> constraints) {
  IdSet closed = relevant;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : constraints) {
      if (closed.contains(c.blocked_id) && closed.insert(c.blocker_id).second) changed = true;
    }
  }
  return closed;
}

IdSet constraint_closure(const SceneRepresentation& scene, const IdSet& relevant) {
  for (const auto& id : relevant) {
    if (!scene.contains(id))
      throw Error(ErrorKind::UnknownElementId, "closure over unknown element '" + id + "'");
  }
  return constraint_closure(relevant, scene.constraints());
}

std::string_view to_string(SupportRelation relation) {
  return relation == SupportRelation::Inside ? "inside" : "on_top_of";
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

SupportRelation relation_from_string(const std::string& s) {
  if (s == "on_top_of") return SupportRelation::OnTopOf;
  if (s == "inside") return SupportRelation::Inside;
  throw Error(ErrorKind::ParseError, "unknown constraint relation '" + s + "'");
}

template <typename T>
T required(const json& obj, const char* key) {
  if (!obj.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing key '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("bad value for '") + key + "': " + ex.what());
  }
}

}  // namespace

json scene_to_json(const SceneRepresentation& scene) {
  json doc;
  doc["classes"] = json::array();
  for (const auto& c : scene.classes()) {
    doc["classes"].push_back(
        {{"id", c.id}, {"name", c.name}, {"criterion", c.criterion}, {"member_ids", c.member_ids}});
  }
  doc["elements"] = json::array();
  for (const auto& e : scene.elements()) {
    json entry = {{"id", e.id}, {"name", e.name}, {"class_id", e.class_id}, {"attributes", e.attributes}};
    if (e.position) entry["position"] = {e.position->x, e.position->y, e.position->z};
    doc["elements"].push_back(std::move(entry));
  }
  doc["constraints"] = json::array();
  for (const auto& c : scene.constraints()) {
    doc["constraints"].push_back({{"blocker_id", c.blocker_id},
                                  {"blocked_id", c.blocked_id},
                                  {"relation", std::string(to_string(c.relation))}});
  }
  return doc;
}

SceneRepresentation scene_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "scene document must be an object");

  std::vector<Element> elements;
  std::vector<SpatialConstraint> constraints;
  for (const auto& entry : doc.value("elements", json::array())) {
    Element e;
    e.id = required<std::string>(entry, "id");
    e.name = required<std::string>(entry, "name");
    e.class_id = required<std::string>(entry, "class_id");
    if (entry.contains("attributes"))
      e.attributes = entry.at("attributes").get<std::map<std::string, std::string>>();
    if (entry.contains("position")) {
      const auto p = entry.at("position").get<std::vector<double>>();
      if (p.size() != 3) throw Error(ErrorKind::ParseError, "position of '" + e.id + "' must be [x,y,z]");
      e.position = Position{p[0], p[1], p[2]};
    }
    // `on_top_of` is shorthand for an explicit on_top_of constraint.
    if (entry.contains("on_top_of"))
      constraints.push_back({e.id, required<std::string>(entry, "on_top_of"), SupportRelation::OnTopOf});
    elements.push_back(std::move(e));
  }

  for (const auto& entry : doc.value("constraints", json::array())) {
    SpatialConstraint c{required<std::string>(entry, "blocker_id"), required<std::string>(entry, "blocked_id"),
                        relation_from_string(entry.value("relation", std::string("on_top_of")))};
    if (std::find(constraints.begin(), constraints.end(), c) == constraints.end()) constraints.push_back(c);
  }

  std::vector<AttributeClass> classes;
  for (const auto& entry : doc.value("classes", json::array())) {
    AttributeClass c;
    c.id = required<std::string>(entry, "id");
    c.name = entry.value("name", c.id);
    c.criterion = entry.value("criterion", std::string());
    if (entry.contains("member_ids")) {
      c.member_ids = entry.at("member_ids").get<std::vector<std::string>>();
    } else {
      for (const auto& e : elements)
        if (e.class_id == c.id) c.member_ids.push_back(e.id);
    }
    classes.push_back(std::move(c));
  }

  return build_scene(std::move(elements), std::move(classes), std::move(constraints));
}

SceneRepresentation load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open scene file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::ParseError, "scene file '" + path + "': " + ex.what());
  }
  return scene_from_json(doc);
}

void save_scene(const SceneRepresentation& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write scene file '" + path + "'");
  out << scene_to_json(scene).dump(2) << '\n';
}

}  // namespace relevance
