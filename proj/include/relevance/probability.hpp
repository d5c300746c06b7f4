#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "relevance/scene.hpp"

namespace relevance {

/// task id -> P(T | O)
using TaskDistribution = std::map<std::string, double>;

/// Feature keys observed so far in one determination episode, e.g.
/// "human_count=2", "utterance:coffee", "task:cold_brew".
class CueSet {
 public:
  CueSet() = default;
  CueSet(std::initializer_list<std::string> keys) : keys_(keys) {}

  void add(std::string key) { keys_.insert(std::move(key)); }
  void merge(const CueSet& other) { keys_.insert(other.keys_.begin(), other.keys_.end()); }
  bool contains(const std::string& key) const { return keys_.contains(key); }
  bool includes(std::span<const std::string> required) const;
  const std::set<std::string>& keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::set<std::string> keys_;
};

/// A task distribution that applies once every key in `requires_cues` has been observed.
struct TaskStage {
  std::vector<std::string> requires_cues;
  std::map<std::string, TaskDistribution> by_objective;
};

/// (class id, task id, objective id)
using ClassTaskKey = std::tuple<std::string, std::string, std::string>;
/// (element id or element name, class id, objective id)
using ElementKey = std::tuple<std::string, std::string, std::string>;

/// Every conditional probability the relevance mechanism consumes. An entry
/// holding std::nullopt is explicitly unavailable; so is an absent entry.
struct ProbabilityTable {
  std::map<std::string, Objective> objectives;
  std::vector<TaskSpec> tasks;
  std::vector<TaskStage> stages;
  std::map<ClassTaskKey, std::optional<double>> class_given_task;
  std::map<ElementKey, std::optional<double>> high_given_class;
  std::map<ElementKey, std::optional<double>> element_given_high;

  /// Range and normalisation checks; throws InvalidProbability / InvalidDistribution.
  void validate() const;
};

nlohmann::json table_to_json(const ProbabilityTable& table);
ProbabilityTable table_from_json(const nlohmann::json& doc);
ProbabilityTable load_table(const std::string& path);
void save_table(const ProbabilityTable& table, const std::string& path);

/// Entropy (nats) of a task distribution; InvalidDistribution if it is not one.
double distribution_entropy(const TaskDistribution& dist);

struct ElementTerms {
  std::optional<double> p_high;             // P(h_j | C_i, O)
  std::optional<double> p_elem_given_high;  // P(e_j | h_j, C_i, O)
};

/// Source of P(T|O), P(C|T,O), P(h|C,O) and P(e|h,C,O) for one scene.
class ProbabilityProvider {
 public:
  explicit ProbabilityProvider(std::shared_ptr<const SceneRepresentation> scene);
  virtual ~ProbabilityProvider() = default;

  const SceneRepresentation& scene() const { return *scene_; }

  virtual std::optional<TaskDistribution> task_distribution(const Objective& objective,
                                                            const CueSet& cues) const = 0;

  /// A recorded preference for any member of the class replaces the provider's
  /// own estimate; otherwise falls through to class_entry().
  std::optional<double> class_given_task(const AttributeClass& cls, const TaskSpec& task,
                                         const Objective& objective,
                                         std::span<const Preference> preferences) const;

  virtual ElementTerms element_terms(const Element& element, const Objective& objective) const = 0;

 protected:
  virtual std::optional<double> class_entry(const AttributeClass& cls, const TaskSpec& task,
                                            const Objective& objective) const = 0;

  void require_class(const AttributeClass& cls) const;
  void require_element(const Element& element) const;

 private:
  std::shared_ptr<const SceneRepresentation> scene_;
};

/// Deterministic file-backed provider.
class TableProvider : public ProbabilityProvider {
 public:
  TableProvider(std::shared_ptr<const SceneRepresentation> scene, ProbabilityTable table);

  const ProbabilityTable& table() const { return table_; }

  /// Among the stages whose cue requirements are met, the lowest-entropy one
  /// wins (earliest on ties). Unavailable when no stage matches.
  std::optional<TaskDistribution> task_distribution(const Objective& objective,
                                                    const CueSet& cues) const override;
  ElementTerms element_terms(const Element& element, const Objective& objective) const override;

 protected:
  std::optional<double> class_entry(const AttributeClass& cls, const TaskSpec& task,
                                    const Objective& objective) const override;

 private:
  void require_objective(const Objective& objective) const;

  ProbabilityTable table_;
};

/// Ablation provider: uniform P(T|O), P(C|T,O) = 1/m, P(h|C,O) = 1/|C|, P(e|h,C,O) = 1.
class UniformProvider : public ProbabilityProvider {
 public:
  UniformProvider(std::shared_ptr<const SceneRepresentation> scene, std::vector<TaskSpec> tasks);

  std::optional<TaskDistribution> task_distribution(const Objective& objective,
                                                    const CueSet& cues) const override;
  ElementTerms element_terms(const Element& element, const Objective& objective) const override;

 protected:
  std::optional<double> class_entry(const AttributeClass& cls, const TaskSpec& task,
                                    const Objective& objective) const override;

 private:
  std::vector<TaskSpec> tasks_;
};

}  // namespace relevance
