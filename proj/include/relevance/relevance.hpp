#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relevance/probability.hpp"
#include "relevance/scene.hpp"

namespace relevance {

struct Thresholds {
  double tau_c = 0.2;
  double tau_e = 0.2;
  double tau_necessary = 0.9;
  double h_max_fraction = 0.5;

  /// InvalidThresholds unless every value is in range and tau_necessary >= tau_e.
  void validate() const;
};

enum class Sufficiency { Sufficient, Insufficient };

/// A score, or the reasons it could not be computed.
struct Assessment {
  std::optional<double> score;
  std::vector<std::string> missing;  // named unavailable terms
  double entropy = 0.0;              // H(P(T|O)) consumed, when known
  bool uncertain = false;            // entropy gate failed

  bool sufficient() const { return score.has_value(); }
};

struct RelevanceResult {
  std::map<ClassId, double> class_scores;
  std::map<ElementId, double> element_scores;
  IdSet relevant_classes;   // C_r
  IdSet relevant_elements;  // E_r
  IdSet closed_elements;    // E_r plus everything blocking it
  Sufficiency sufficiency = Sufficiency::Sufficient;
  std::vector<std::string> missing;
  double task_entropy = 0.0;

  bool sufficient() const { return sufficiency == Sufficiency::Sufficient; }
};

/// H = -sum p ln p in nats, with 0 ln 0 = 0.
double task_entropy(const TaskDistribution& dist);

/// Insufficient when anything is unavailable or entropy > fraction * ln(max(task_count, 2)).
Sufficiency check_sufficiency(bool all_available, double entropy, std::size_t task_count,
                              double h_max_fraction);

struct RelevanceContext {
  const ProbabilityProvider& provider;
  const Objective& objective;
  std::span<const TaskSpec> tasks;
  const CueSet& cues;
  std::span<const Preference> preferences = {};
  double h_max_fraction = 0.5;
};

/// R(C) = sum_T P(C|T,O) P(T|O), gated on availability and task entropy.
Assessment class_relevance(const AttributeClass& cls, const RelevanceContext& ctx);

/// R(e) = R(C) P(e|h,C,O) P(h|C,O).
Assessment element_relevance(const Element& element, double class_score, const ProbabilityProvider& provider,
                             const Objective& objective);

/// Two-level determination: classes first, then elements of relevant classes
/// only, then constraint closure. Score >= threshold counts as relevant.
RelevanceResult determine(const SceneRepresentation& scene, const Objective& objective,
                          std::span<const TaskSpec> tasks, const ProbabilityProvider& provider,
                          const CueSet& cues, const Thresholds& thresholds,
                          std::span<const Preference> preferences = {});

/// Builds a sufficient result from externally supplied scores, applying the
/// same class-first thresholding and closure as determine().
RelevanceResult select_relevant(const SceneRepresentation& scene, std::map<ClassId, double> class_scores,
                                const std::function<double(const Element&, double class_score)>& element_score,
                                const Thresholds& thresholds);

struct NecessityPartition {
  IdSet necessary;
  IdSet optional;
};

/// necessary = score >= tau_necessary; optional = the rest of E_r.
NecessityPartition necessity_partition(const RelevanceResult& result, const Thresholds& thresholds);

nlohmann::json result_to_json(const RelevanceResult& result);

}  // namespace relevance
