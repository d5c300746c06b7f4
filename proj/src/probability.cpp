#include "relevance/probability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "relevance/error.hpp"

namespace relevance {

using nlohmann::json;

bool CueSet::includes(std::span<const std::string> required) const {
  return std::all_of(required.begin(), required.end(), [&](const auto& k) { return keys_.contains(k); });
}

namespace {

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorKind::InvalidProbability, what + " = " + std::to_string(p) + " is outside [0, 1]");
}

std::string key_string(const std::tuple<std::string, std::string, std::string>& k) {
  return std::get<0>(k) + "|" + std::get<1>(k) + "|" + std::get<2>(k);
}

}  // namespace

double distribution_entropy(const TaskDistribution& dist) {
  if (dist.empty()) throw Error(ErrorKind::InvalidDistribution, "empty task distribution");
  double sum = 0.0;
  double h = 0.0;
  for (const auto& [task, p] : dist) {
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(ErrorKind::InvalidDistribution, "P(" + task + ") = " + std::to_string(p));
    sum += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidDistribution, "task probabilities sum to " + std::to_string(sum));
  return h;
}

void ProbabilityTable::validate() const {
  for (const auto& stage : stages) {
    for (const auto& [objective, dist] : stage.by_objective) distribution_entropy(dist);
  }
  for (const auto& [k, p] : class_given_task)
    if (p) check_probability(*p, "P(C|T,O)[" + key_string(k) + "]");
  for (const auto& [k, p] : high_given_class)
    if (p) check_probability(*p, "P(h|C,O)[" + key_string(k) + "]");
  for (const auto& [k, p] : element_given_high)
    if (p) check_probability(*p, "P(e|h,C,O)[" + key_string(k) + "]");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json optional_number(const std::optional<double>& p) { return p ? json(*p) : json(nullptr); }

std::optional<double> read_probability(const json& entry) {
  if (!entry.contains("p") || entry.at("p").is_null()) return std::nullopt;
  if (!entry.at("p").is_number()) throw Error(ErrorKind::ParseError, "probability must be a number or null");
  return entry.at("p").get<double>();
}

std::string read_string(const json& entry, const char* key) {
  if (!entry.contains(key) || !entry.at(key).is_string())
    throw Error(ErrorKind::ParseError, std::string("table entry is missing string '") + key + "'");
  return entry.at(key).get<std::string>();
}

std::map<std::string, TaskDistribution> read_distributions(const json& obj) {
  std::map<std::string, TaskDistribution> out;
  for (const auto& [objective, tasks] : obj.items()) {
    for (const auto& [task, p] : tasks.items()) {
      if (!p.is_number()) throw Error(ErrorKind::ParseError, "P(T|O) entries must be numbers");
      out[objective][task] = p.get<double>();
    }
  }
  return out;
}

}  // namespace

json table_to_json(const ProbabilityTable& table) {
  json doc;
  doc["objectives"] = json::array();
  for (const auto& [id, o] : table.objectives) doc["objectives"].push_back({{"id", o.id}, {"text", o.text}});
  doc["tasks"] = json::array();
  for (const auto& t : table.tasks) doc["tasks"].push_back({{"id", t.id}, {"description", t.description}});
  doc["stages"] = json::array();
  for (const auto& s : table.stages) {
    json dists = json::object();
    for (const auto& [objective, dist] : s.by_objective) dists[objective] = dist;
    doc["stages"].push_back({{"requires", s.requires_cues}, {"task_given_objective", dists}});
  }
  doc["class_given_task"] = json::array();
  for (const auto& [k, p] : table.class_given_task) {
    doc["class_given_task"].push_back({{"class_id", std::get<0>(k)},
                                       {"task_id", std::get<1>(k)},
                                       {"objective_id", std::get<2>(k)},
                                       {"p", optional_number(p)}});
  }
  doc["high_given_class"] = json::array();
  for (const auto& [k, p] : table.high_given_class) {
    doc["high_given_class"].push_back({{"element", std::get<0>(k)},
                                       {"class_id", std::get<1>(k)},
                                       {"objective_id", std::get<2>(k)},
                                       {"p", optional_number(p)}});
  }
  doc["element_given_high"] = json::array();
  for (const auto& [k, p] : table.element_given_high) {
    doc["element_given_high"].push_back({{"element_id", std::get<0>(k)},
                                         {"class_id", std::get<1>(k)},
                                         {"objective_id", std::get<2>(k)},
                                         {"p", optional_number(p)}});
  }
  return doc;
}

ProbabilityTable table_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "probability table must be an object");
  ProbabilityTable table;
  try {
    for (const auto& o : doc.value("objectives", json::array())) {
      Objective objective{read_string(o, "id"), o.value("text", std::string())};
      table.objectives[objective.id] = objective;
    }
    for (const auto& t : doc.value("tasks", json::array()))
      table.tasks.push_back({read_string(t, "id"), t.value("description", std::string())});

    // A top-level distribution is the unconditional stage.
    if (doc.contains("task_given_objective"))
      table.stages.push_back({{}, read_distributions(doc.at("task_given_objective"))});
    for (const auto& s : doc.value("stages", json::array())) {
      table.stages.push_back({s.value("requires", std::vector<std::string>{}),
                              read_distributions(s.value("task_given_objective", json::object()))});
    }
    for (const auto& e : doc.value("class_given_task", json::array())) {
      table.class_given_task[{read_string(e, "class_id"), read_string(e, "task_id"),
                              read_string(e, "objective_id")}] = read_probability(e);
    }
    for (const auto& e : doc.value("high_given_class", json::array())) {
      table.high_given_class[{read_string(e, "element"), read_string(e, "class_id"),
                              read_string(e, "objective_id")}] = read_probability(e);
    }
    for (const auto& e : doc.value("element_given_high", json::array())) {
      table.element_given_high[{read_string(e, "element_id"), read_string(e, "class_id"),
                                read_string(e, "objective_id")}] = read_probability(e);
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("probability table: ") + ex.what());
  }
  // Objectives referenced only by distributions are registered implicitly.
  for (const auto& s : table.stages)
    for (const auto& [objective, _] : s.by_objective)
      table.objectives.try_emplace(objective, Objective{objective, ""});
  table.validate();
  return table;
}

ProbabilityTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open probability table '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::ParseError, "probability table '" + path + "': " + ex.what());
  }
  return table_from_json(doc);
}

void save_table(const ProbabilityTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write probability table '" + path + "'");
  out << table_to_json(table).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Providers

ProbabilityProvider::ProbabilityProvider(std::shared_ptr<const SceneRepresentation> scene)
    : scene_(std::move(scene)) {
  if (!scene_) scene_ = std::make_shared<const SceneRepresentation>();
}

void ProbabilityProvider::require_class(const AttributeClass& cls) const {
  if (!scene_->find_class(cls.id)) throw Error(ErrorKind::UnknownClass, "class '" + cls.id + "' not in scene");
}

void ProbabilityProvider::require_element(const Element& element) const {
  if (!scene_->contains(element.id))
    throw Error(ErrorKind::UnknownElement, "element '" + element.id + "' not in scene");
}

std::optional<double> ProbabilityProvider::class_given_task(const AttributeClass& cls, const TaskSpec& task,
                                                            const Objective& objective,
                                                            std::span<const Preference> preferences) const {
  require_class(cls);
  std::optional<double> preferred;
  for (const auto& pref : preferences) {
    check_probability(pref.weight, "preference weight for '" + pref.element_name + "'");
    for (const auto& member : cls.member_ids) {
      const auto& e = scene_->element(member);
      if (e.name == pref.element_name || e.type() == pref.element_name) {
        preferred = std::max(preferred.value_or(0.0), pref.weight);
        break;
      }
    }
  }
  if (preferred) return preferred;
  return class_entry(cls, task, objective);
}

TableProvider::TableProvider(std::shared_ptr<const SceneRepresentation> scene, ProbabilityTable table)
    : ProbabilityProvider(std::move(scene)), table_(std::move(table)) {
  table_.validate();
}

void TableProvider::require_objective(const Objective& objective) const {
  if (!table_.objectives.contains(objective.id))
    throw Error(ErrorKind::UnknownObjective, "objective '" + objective.id + "' is not registered");
}

std::optional<TaskDistribution> TableProvider::task_distribution(const Objective& objective,
                                                                 const CueSet& cues) const {
  require_objective(objective);
  const TaskDistribution* best = nullptr;
  double best_entropy = std::numeric_limits<double>::infinity();
  for (const auto& stage : table_.stages) {
    if (!cues.includes(stage.requires_cues)) continue;
    auto it = stage.by_objective.find(objective.id);
    if (it == stage.by_objective.end()) continue;
    const double h = distribution_entropy(it->second);
    if (h < best_entropy) {
      best = &it->second;
      best_entropy = h;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::optional<double> TableProvider::class_entry(const AttributeClass& cls, const TaskSpec& task,
                                                 const Objective& objective) const {
  require_objective(objective);
  auto it = table_.class_given_task.find({cls.id, task.id, objective.id});
  return it == table_.class_given_task.end() ? std::nullopt : it->second;
}

ElementTerms TableProvider::element_terms(const Element& element, const Objective& objective) const {
  require_element(element);
  require_objective(objective);
  ElementTerms terms;

  for (const auto* ref : {&element.id, &element.name, &element.type()}) {
    auto it = table_.high_given_class.find({*ref, element.class_id, objective.id});
    if (it != table_.high_given_class.end()) {
      terms.p_high = it->second;
      break;
    }
  }

  auto it = table_.element_given_high.find({element.id, element.class_id, objective.id});
  if (it != table_.element_given_high.end()) {
    terms.p_elem_given_high = it->second;
  } else {
    // With a single candidate of this type in its class, h_j implies e_j.
    const auto& cls = scene().attribute_class(element.class_id);
    const auto same_type = std::count_if(cls.member_ids.begin(), cls.member_ids.end(), [&](const auto& id) {
      return scene().element(id).type() == element.type();
    });
    if (same_type == 1) terms.p_elem_given_high = 1.0;
  }
  return terms;
}

UniformProvider::UniformProvider(std::shared_ptr<const SceneRepresentation> scene, std::vector<TaskSpec> tasks)
    : ProbabilityProvider(std::move(scene)), tasks_(std::move(tasks)) {}

std::optional<TaskDistribution> UniformProvider::task_distribution(const Objective&, const CueSet&) const {
  if (tasks_.empty()) return std::nullopt;
  TaskDistribution dist;
  for (const auto& t : tasks_) dist[t.id] = 1.0 / static_cast<double>(tasks_.size());
  return dist;
}

std::optional<double> UniformProvider::class_entry(const AttributeClass&, const TaskSpec&,
                                                   const Objective&) const {
  const auto m = scene().classes().size();
  return m == 0 ? std::nullopt : std::optional<double>(1.0 / static_cast<double>(m));
}

ElementTerms UniformProvider::element_terms(const Element& element, const Objective&) const {
  require_element(element);
  const auto& cls = scene().attribute_class(element.class_id);
  return {1.0 / static_cast<double>(cls.member_ids.size()), 1.0};
}

}  // namespace relevance
