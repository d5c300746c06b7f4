#include "relevance/relevance.hpp"

#include <algorithm>
#include <cmath>

#include "relevance/error.hpp"

namespace relevance {

void Thresholds::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(tau_c) || !in_unit(tau_e) || !in_unit(tau_necessary))
    throw Error(ErrorKind::InvalidThresholds, "thresholds must lie in [0, 1]");
  if (!(h_max_fraction > 0.0 && h_max_fraction <= 1.0))
    throw Error(ErrorKind::InvalidThresholds, "h_max_fraction must lie in (0, 1]");
  if (tau_necessary < tau_e) throw Error(ErrorKind::InvalidThresholds, "tau_necessary must be >= tau_e");
}

double task_entropy(const TaskDistribution& dist) { return distribution_entropy(dist); }

Sufficiency check_sufficiency(bool all_available, double entropy, std::size_t task_count, double h_max_fraction) {
  if (!all_available) return Sufficiency::Insufficient;
  const double limit = h_max_fraction * std::log(static_cast<double>(std::max<std::size_t>(task_count, 2)));
  return entropy > limit ? Sufficiency::Insufficient : Sufficiency::Sufficient;
}

namespace {

struct TaskBelief {
  std::optional<TaskDistribution> dist;
  double entropy = 0.0;
  bool uncertain = false;
  std::vector<std::string> missing;
};

TaskBelief assess_tasks(const RelevanceContext& ctx) {
  TaskBelief belief;
  belief.dist = ctx.provider.task_distribution(ctx.objective, ctx.cues);
  if (!belief.dist) {
    belief.missing.push_back("P(T|O=" + ctx.objective.id + ")");
    return belief;
  }
  belief.entropy = task_entropy(*belief.dist);
  const auto count = std::max(ctx.tasks.size(), belief.dist->size());
  belief.uncertain =
      check_sufficiency(true, belief.entropy, count, ctx.h_max_fraction) == Sufficiency::Insufficient;
  return belief;
}

const TaskSpec& task_for(std::span<const TaskSpec> tasks, const std::string& id, TaskSpec& scratch) {
  for (const auto& t : tasks)
    if (t.id == id) return t;
  scratch = TaskSpec{id, ""};
  return scratch;
}

// Sum over tasks with nonzero mass; zero-mass tasks contribute nothing and
// are not consulted.
Assessment class_score(const AttributeClass& cls, const TaskBelief& belief, const RelevanceContext& ctx) {
  Assessment out;
  out.entropy = belief.entropy;
  double total = 0.0;
  TaskSpec scratch;
  for (const auto& [task_id, p_task] : *belief.dist) {
    if (p_task == 0.0) continue;
    const auto& task = task_for(ctx.tasks, task_id, scratch);
    const auto p_class = ctx.provider.class_given_task(cls, task, ctx.objective, ctx.preferences);
    if (!p_class) {
      out.missing.push_back("P(C=" + cls.id + "|T=" + task_id + ",O=" + ctx.objective.id + ")");
      continue;
    }
    total += *p_class * p_task;
  }
  if (out.missing.empty()) out.score = std::clamp(total, 0.0, 1.0);
  return out;
}

}  // namespace

Assessment class_relevance(const AttributeClass& cls, const RelevanceContext& ctx) {
  if (ctx.tasks.empty()) throw Error(ErrorKind::InvalidDistribution, "class relevance needs at least one task");
  const auto belief = assess_tasks(ctx);
  if (!belief.dist) return {std::nullopt, belief.missing, 0.0, false};
  auto out = class_score(cls, belief, ctx);
  if (belief.uncertain) {
    out.score.reset();
    out.uncertain = true;
  }
  return out;
}

Assessment element_relevance(const Element& element, double class_score, const ProbabilityProvider& provider,
                             const Objective& objective) {
  Assessment out;
  const auto terms = provider.element_terms(element, objective);
  const std::string suffix = "C=" + element.class_id + ",O=" + objective.id + ")";
  if (!terms.p_high) out.missing.push_back("P(h=" + element.type() + "|" + suffix);
  if (!terms.p_elem_given_high) out.missing.push_back("P(e=" + element.id + "|h," + suffix);
  if (out.missing.empty()) out.score = class_score * *terms.p_elem_given_high * *terms.p_high;
  return out;
}

RelevanceResult select_relevant(const SceneRepresentation& scene, std::map<ClassId, double> class_scores,
                                const std::function<double(const Element&, double)>& element_score,
                                const Thresholds& thresholds) {
  RelevanceResult result;
  result.class_scores = std::move(class_scores);
  for (const auto& [id, score] : result.class_scores)
    if (score >= thresholds.tau_c) result.relevant_classes.insert(id);
  for (const auto& cls_id : result.relevant_classes) {
    const double cs = result.class_scores.at(cls_id);
    for (const auto& member : scene.attribute_class(cls_id).member_ids) {
      const double score = element_score(scene.element(member), cs);
      result.element_scores[member] = score;
      if (score >= thresholds.tau_e) result.relevant_elements.insert(member);
    }
  }
  result.closed_elements = constraint_closure(result.relevant_elements, scene.constraints());
  return result;
}

RelevanceResult determine(const SceneRepresentation& scene, const Objective& objective,
                          std::span<const TaskSpec> tasks, const ProbabilityProvider& provider, const CueSet& cues,
                          const Thresholds& thresholds, std::span<const Preference> preferences) {
  thresholds.validate();
  if (tasks.empty()) throw Error(ErrorKind::InvalidDistribution, "determination needs at least one task");
  const RelevanceContext ctx{provider, objective, tasks, cues, preferences, thresholds.h_max_fraction};

  auto insufficient = [](std::vector<std::string> missing, double entropy) {
    RelevanceResult r;
    r.sufficiency = Sufficiency::Insufficient;
    r.missing = std::move(missing);
    r.task_entropy = entropy;
    return r;
  };

  const auto belief = assess_tasks(ctx);
  if (!belief.dist || belief.uncertain) return insufficient(belief.missing, belief.entropy);

  std::vector<std::string> missing;
  std::map<ClassId, double> class_scores;
  for (const auto& cls : scene.classes()) {
    auto a = class_score(cls, belief, ctx);
    if (a.score) class_scores[cls.id] = *a.score;
    missing.insert(missing.end(), a.missing.begin(), a.missing.end());
  }
  if (!missing.empty()) return insufficient(std::move(missing), belief.entropy);

  // Element terms are only requested inside classes that pass tau_c.
  auto result = select_relevant(
      scene, std::move(class_scores),
      [&](const Element& e, double cs) {
        auto a = element_relevance(e, cs, provider, objective);
        missing.insert(missing.end(), a.missing.begin(), a.missing.end());
        return a.score.value_or(0.0);
      },
      thresholds);
  if (!missing.empty()) return insufficient(std::move(missing), belief.entropy);
  result.task_entropy = belief.entropy;
  return result;
}

NecessityPartition necessity_partition(const RelevanceResult& result, const Thresholds& thresholds) {
  if (!result.sufficient())
    throw Error(ErrorKind::InsufficientResult, "necessity partition needs a sufficient result");
  NecessityPartition out;
  for (const auto& id : result.relevant_elements) {
    if (result.element_scores.at(id) >= thresholds.tau_necessary)
      out.necessary.insert(id);
    else
      out.optional.insert(id);
  }
  return out;
}

nlohmann::json result_to_json(const RelevanceResult& result) {
  nlohmann::json doc;
  doc["sufficient"] = result.sufficient();
  doc["task_entropy"] = result.task_entropy;
  doc["missing"] = result.missing;
  doc["class_scores"] = result.class_scores;
  doc["element_scores"] = result.element_scores;
  doc["relevant_classes"] = result.relevant_classes;
  doc["relevant_elements"] = result.relevant_elements;
  doc["closed_elements"] = result.closed_elements;
  return doc;
}

}  // namespace relevance
