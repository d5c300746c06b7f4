#include "relevance/events.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "relevance/channel.hpp"
#include "relevance/error.hpp"

namespace relevance {

using nlohmann::json;

std::string_view to_string(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::HumanCountChanged: return "HumanCountChanged";
    case TriggerKind::ObjectiveUpdated: return "ObjectiveUpdated";
    case TriggerKind::ElementSetChanged: return "ElementSetChanged";
  }
  return "?";
}

std::vector<TriggerEvent> check_triggers(const FeatureSnapshot& prev, const FeatureSnapshot& cur) {
  if (!(prev.tick < cur.tick))
    throw Error(ErrorKind::NonMonotonicTick,
                "tick " + std::to_string(cur.tick) + " does not follow " + std::to_string(prev.tick));
  std::vector<TriggerEvent> out;
  if (prev.human_count() != cur.human_count())
    out.push_back({TriggerKind::HumanCountChanged, cur.tick,
                   std::to_string(prev.human_count()) + "->" + std::to_string(cur.human_count())});
  if (cur.objective && cur.objective != prev.objective)
    out.push_back({TriggerKind::ObjectiveUpdated, cur.tick, *cur.objective});
  const std::set<ElementId> before(prev.elements.begin(), prev.elements.end());
  const std::set<ElementId> after(cur.elements.begin(), cur.elements.end());
  if (before != after) {
    std::size_t added = 0, removed = 0;
    for (const auto& id : after) added += !before.contains(id);
    for (const auto& id : before) removed += !after.contains(id);
    out.push_back({TriggerKind::ElementSetChanged, cur.tick,
                   "+" + std::to_string(added) + " -" + std::to_string(removed)});
  }
  return out;
}

CueSet extract_cues(const FeatureSnapshot& snapshot) {
  CueSet cues;
  cues.add("human_count=" + std::to_string(snapshot.human_count()));
  for (const auto& m : snapshot.motions) cues.add("motion:" + m);
  for (const auto& text : snapshot.transcripts) {
    std::string token;
    auto flush = [&] {
      if (!token.empty()) cues.add("utterance:" + token);
      token.clear();
    };
    for (char c : text) {
      if (std::isalnum(static_cast<unsigned char>(c)))
        token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      else
        flush();
    }
    flush();
  }
  for (const auto& t : snapshot.declared_tasks) cues.add("task:" + t);
  if (snapshot.objective) cues.add("objective:" + *snapshot.objective);
  return cues;
}

Decision generate_decision(const SceneRepresentation& scene, const RelevanceResult& result,
                           std::span<const Preference> preferences, const Thresholds& thresholds) {
  const auto partition = necessity_partition(result, thresholds);
  auto by_score = [&](const IdSet& ids) {
    std::vector<ElementId> v(ids.begin(), ids.end());
    std::stable_sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
      return result.element_scores.at(a) > result.element_scores.at(b);
    });
    return v;
  };

  Decision d;
  std::set<std::string> seen;
  auto take = [&](std::vector<std::string>& list, const std::string& name) {
    if (seen.insert(name).second) list.push_back(name);
  };
  for (const auto& id : by_score(partition.necessary)) take(d.fetch_actions, scene.element(id).name);
  for (const auto& id : by_score(partition.optional)) {
    const auto& e = scene.element(id);
    std::optional<double> weight;
    for (const auto& p : preferences)
      if (p.element_name == e.name || p.element_name == e.type()) weight = std::max(weight.value_or(0.0), p.weight);
    if (!weight)
      take(d.inquiries, e.name);
    else if (*weight >= 0.5)
      take(d.fetch_actions, e.name);
    else
      take(d.declined, e.name);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Episode log

std::string EpisodeLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records)
    out += "{\"tick\":" + std::to_string(r.tick) + ",\"kind\":" + json(r.kind).dump() +
           ",\"payload\":" + r.payload.dump() + "}\n";
  return out;
}

EpisodeLog EpisodeLog::from_jsonl(const std::string& text) {
  EpisodeLog log;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto doc = json::parse(line);
      log.records.push_back({doc.at("tick").get<std::int64_t>(), doc.at("kind").get<std::string>(), doc.at("payload")});
    } catch (const json::exception& ex) {
      throw Error(ErrorKind::ParseError, std::string("episode log: ") + ex.what());
    }
  }
  return log;
}

std::vector<LogRecord> EpisodeLog::outcomes() const {
  std::vector<LogRecord> out;
  for (const auto& r : records)
    if (r.kind == "determination" || r.kind == "decision") out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

class Consumer {
 public:
  Consumer(const PipelineConfig& config, EpisodeLog& log) : config_(config), log_(log) {}

  void process(const FeatureSnapshot& s) {
    log_.records.push_back({s.tick, "snapshot", snapshot_to_json(s)});
    if (s.objective) objective_ = s.objective;

    if (prev_) {
      const auto events = check_triggers(*prev_, s);
      for (const auto& e : events)
        log_.records.push_back({s.tick, "trigger", {{"kind", to_string(e.kind)}, {"detail", e.detail}}});
      if (!events.empty()) {
        episode_.reset();
        if (!s.humans.empty()) episode_ = Episode{focus(*prev_, s), {}};
      }
    }
    prev_ = s;
    if (!episode_) return;

    episode_->cues.merge(extract_cues(s));
    if (determine_once(s)) episode_.reset();
  }

 private:
  struct Episode {
    std::string human;
    CueSet cues;
  };

  static std::string focus(const FeatureSnapshot& prev, const FeatureSnapshot& cur) {
    for (auto it = cur.humans.rbegin(); it != cur.humans.rend(); ++it)
      if (std::find(prev.humans.begin(), prev.humans.end(), *it) == prev.humans.end()) return *it;
    return cur.humans.back();
  }

  // True once a decision has been made.
  bool determine_once(const FeatureSnapshot& s) {
    json payload = {{"human", episode_->human}, {"cues", episode_->cues.keys()}};
    auto insufficient = [&](std::vector<std::string> missing, double entropy) {
      payload["objective"] = objective_ ? json(*objective_) : json(nullptr);
      payload["sufficient"] = false;
      payload["task_entropy"] = entropy;
      payload["missing"] = std::move(missing);
      log_.records.push_back({s.tick, "determination", payload});
      return false;
    };
    if (!objective_) return insufficient({"objective"}, 0.0);
    auto obj_it = config_.objectives.find(*objective_);
    if (obj_it == config_.objectives.end()) return insufficient({"objective:" + *objective_}, 0.0);

    std::vector<Preference> prefs;
    for (const auto& p : config_.preferences)
      if (p.human_id == episode_->human) prefs.push_back(p);

    RelevanceResult result;
    try {
      result = determine(config_.scene, obj_it->second, config_.tasks, config_.provider, episode_->cues,
                         config_.thresholds, prefs);
    } catch (const Error& ex) {
      if (ex.kind() != ErrorKind::UnknownObjective) throw;
      return insufficient({"objective:" + *objective_}, 0.0);
    }
    if (!result.sufficient()) return insufficient(result.missing, result.task_entropy);

    if (!s.elements.empty()) {
      const IdSet present(s.elements.begin(), s.elements.end());
      std::erase_if(result.relevant_elements, [&](const auto& id) { return !present.contains(id); });
      std::erase_if(result.closed_elements, [&](const auto& id) { return !present.contains(id); });
    }
    const auto partition = necessity_partition(result, config_.thresholds);
    payload["objective"] = *objective_;
    payload["sufficient"] = true;
    payload["task_entropy"] = result.task_entropy;
    payload["missing"] = json::array();
    payload["relevant"] = result.relevant_elements;
    payload["necessary"] = partition.necessary;
    log_.records.push_back({s.tick, "determination", payload});

    const auto decision = generate_decision(config_.scene, result, prefs, config_.thresholds);
    log_.records.push_back({s.tick,
                            "decision",
                            {{"human", episode_->human},
                             {"fetch", decision.fetch_actions},
                             {"inquiries", decision.inquiries},
                             {"declined", decision.declined}}});
    return true;
  }

  const PipelineConfig& config_;
  EpisodeLog& log_;
  std::optional<FeatureSnapshot> prev_;
  std::optional<std::string> objective_;
  std::optional<Episode> episode_;
};

}  // namespace

EpisodeLog run_pipeline(const std::vector<FeatureSnapshot>& scenario, const PipelineConfig& config,
                        const PipelineOptions& options) {
  if (scenario.empty()) throw Error(ErrorKind::EmptyScenario, "scenario has no snapshots");
  config.thresholds.validate();
  EpisodeLog log;
  Consumer consumer(config, log);

  if (options.mode == PipelineMode::Synchronous) {
    for (const auto& s : scenario) consumer.process(s);
    return log;
  }

  BoundedChannel<FeatureSnapshot> channel(options.channel_capacity);
  std::mutex dropped_mutex;
  std::vector<std::int64_t> dropped;
  {
    std::jthread producer([&] {
      for (const auto& s : scenario) {
        if (options.tick_interval.count() > 0) std::this_thread::sleep_for(options.tick_interval);
        if (auto old = channel.push(s)) {
          std::lock_guard lock(dropped_mutex);
          dropped.push_back(old->tick);
        }
      }
      channel.close();
    });
    while (auto s = channel.pop()) consumer.process(*s);
  }
  // Overflow is reported after the fact so the in-order records stay comparable.
  std::sort(dropped.begin(), dropped.end());
  for (auto tick : dropped) log.records.push_back({tick, "dropped", json::object()});
  return log;
}

// ---------------------------------------------------------------------------
// Scenario files

json snapshot_to_json(const FeatureSnapshot& s) {
  return {
      {"tick", s.tick},
      {"visual", {{"elements", s.elements}, {"humans", s.humans}, {"motion", s.motions}}},
      {"auditory", {{"transcripts", s.transcripts}}},
      {"contextual", {{"objective", s.objective ? json(*s.objective) : json(nullptr)}, {"tasks", s.declared_tasks}}},
  };
}

FeatureSnapshot snapshot_from_json(const json& doc) {
  try {
    FeatureSnapshot s;
    s.tick = doc.at("tick").get<std::int64_t>();
    const auto visual = doc.value("visual", json::object());
    s.elements = visual.value("elements", std::vector<std::string>{});
    s.humans = visual.value("humans", std::vector<std::string>{});
    s.motions = visual.value("motion", std::vector<std::string>{});
    s.transcripts = doc.value("auditory", json::object()).value("transcripts", std::vector<std::string>{});
    const auto contextual = doc.value("contextual", json::object());
    if (contextual.contains("objective") && !contextual.at("objective").is_null())
      s.objective = contextual.at("objective").get<std::string>();
    s.declared_tasks = contextual.value("tasks", std::vector<std::string>{});
    return s;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("snapshot: ") + ex.what());
  }
}

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::ParseError, path + ": " + ex.what());
  }
}

void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace

std::vector<FeatureSnapshot> load_scenario(const std::string& path) {
  const auto doc = read_json_file(path);
  const auto& list = doc.is_object() ? doc.at("snapshots") : doc;
  if (!list.is_array()) throw Error(ErrorKind::ParseError, path + ": scenario must be an array of snapshots");
  std::vector<FeatureSnapshot> out;
  for (const auto& s : list) out.push_back(snapshot_from_json(s));
  return out;
}

void save_scenario(const std::vector<FeatureSnapshot>& scenario, const std::string& path) {
  json doc = json::array();
  for (const auto& s : scenario) doc.push_back(snapshot_to_json(s));
  write_json_file(doc, path);
}

std::vector<Preference> load_preferences(const std::string& path) {
  const auto doc = read_json_file(path);
  std::vector<Preference> out;
  try {
    for (const auto& p : doc)
      out.push_back({p.at("human_id").get<std::string>(), p.at("element_name").get<std::string>(),
                     p.at("weight").get<double>()});
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::ParseError, path + ": " + ex.what());
  }
  for (const auto& p : out)
    if (!(p.weight >= 0.0 && p.weight <= 1.0))
      throw Error(ErrorKind::InvalidProbability, "preference weight for '" + p.element_name + "' is outside [0, 1]");
  return out;
}

void save_preferences(const std::vector<Preference>& preferences, const std::string& path) {
  json doc = json::array();
  for (const auto& p : preferences)
    doc.push_back({{"human_id", p.human_id}, {"element_name", p.element_name}, {"weight", p.weight}});
  write_json_file(doc, path);
}

std::vector<FeatureSnapshot> coffee_demo_scenario() {
  auto frame = [](std::int64_t tick, std::vector<std::string> humans) {
    FeatureSnapshot s;
    s.tick = tick;
    s.humans = std::move(humans);
    return s;
  };
  std::vector<FeatureSnapshot> out;
  out.push_back(frame(0, {}));
  out.back().objective = "conference_break";
  out.push_back(frame(1, {}));
  out.push_back(frame(2, {"alice"}));
  out.back().motions = {"grab_coffee"};
  out.push_back(frame(3, {"alice"}));
  out.push_back(frame(4, {"alice", "bob"}));
  out.push_back(frame(5, {"alice", "bob"}));
  out.back().transcripts = {"Nice weather today."};
  out.push_back(frame(6, {"alice", "bob"}));
  out.back().transcripts = {"Have you tried the cold brew coffee here?"};
  out.push_back(frame(7, {"alice", "bob"}));
  return out;
}

}  // namespace relevance
