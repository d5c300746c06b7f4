#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relevance/probability.hpp"
#include "relevance/relevance.hpp"
#include "relevance/scene.hpp"

namespace relevance {

/// One perception frame: visual, auditory and contextual features.
struct FeatureSnapshot {
  std::int64_t tick = 0;
  // visual
  std::vector<ElementId> elements;  // empty means "whole scene"
  std::vector<std::string> humans;  // ids in arrival order
  std::vector<std::string> motions;
  // auditory
  std::vector<std::string> transcripts;
  // contextual
  std::optional<std::string> objective;
  std::vector<std::string> declared_tasks;

  std::size_t human_count() const { return humans.size(); }
};

enum class TriggerKind { HumanCountChanged, ObjectiveUpdated, ElementSetChanged };
std::string_view to_string(TriggerKind kind);

struct TriggerEvent {
  TriggerKind kind = TriggerKind::HumanCountChanged;
  std::int64_t tick = 0;
  std::string detail;
};

/// One event per changed watched quantity. Throws NonMonotonicTick unless prev.tick < cur.tick.
std::vector<TriggerEvent> check_triggers(const FeatureSnapshot& prev, const FeatureSnapshot& cur);

/// human_count=N, motion:<flag>, utterance:<token>, task:<id>, objective:<id>.
CueSet extract_cues(const FeatureSnapshot& snapshot);

struct Decision {
  std::vector<std::string> fetch_actions;  // element names
  std::vector<std::string> inquiries;      // element names
  std::vector<std::string> declined;       // optional names the person has said no to
};

/// Necessary elements are fetched; optional ones are fetched when a matching
/// preference weighs >= 0.5, skipped when it weighs less, and asked about
/// otherwise. Names are deduplicated. Throws InsufficientResult.
Decision generate_decision(const SceneRepresentation& scene, const RelevanceResult& result,
                           std::span<const Preference> preferences, const Thresholds& thresholds);

struct LogRecord {
  std::int64_t tick = 0;
  std::string kind;  // snapshot | trigger | determination | decision | dropped
  nlohmann::json payload;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct EpisodeLog {
  std::vector<LogRecord> records;

  /// One {"tick","kind","payload"} object per line.
  std::string to_jsonl() const;
  static EpisodeLog from_jsonl(const std::string& text);
  /// Only determination and decision records, in order.
  std::vector<LogRecord> outcomes() const;
};

struct PipelineConfig {
  const SceneRepresentation& scene;
  const ProbabilityProvider& provider;
  std::vector<TaskSpec> tasks;
  std::map<std::string, Objective> objectives;  // resolves objective hints
  Thresholds thresholds;
  std::vector<Preference> preferences;
};

enum class PipelineMode { Synchronous, Concurrent };

struct PipelineOptions {
  PipelineMode mode = PipelineMode::Synchronous;
  std::size_t channel_capacity = 64;
  std::chrono::microseconds tick_interval{0};  // producer pacing in concurrent mode
};

/// Replays the scenario. A trigger with people present opens an episode for
/// the latest arrival; cues then accumulate and determination is retried on
/// every snapshot until it is sufficient, which yields a Decision. Throws
/// EmptyScenario or NonMonotonicTick.
EpisodeLog run_pipeline(const std::vector<FeatureSnapshot>& scenario, const PipelineConfig& config,
                        const PipelineOptions& options = {});

nlohmann::json snapshot_to_json(const FeatureSnapshot& snapshot);
FeatureSnapshot snapshot_from_json(const nlohmann::json& doc);
std::vector<FeatureSnapshot> load_scenario(const std::string& path);
void save_scenario(const std::vector<FeatureSnapshot>& scenario, const std::string& path);
std::vector<Preference> load_preferences(const std::string& path);
void save_preferences(const std::vector<Preference>& preferences, const std::string& path);

/// Two people arrive at the coffee table; the first has recorded preferences,
/// the second only reveals intent by talking about coffee.
std::vector<FeatureSnapshot> coffee_demo_scenario();

}  // namespace relevance
