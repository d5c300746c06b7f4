#include "relevance/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relevance/error.hpp"
#include "relevance/events.hpp"
#include "relevance/external_provider.hpp"
#include "relevance/generators.hpp"
#include "relevance/metrics.hpp"
#include "relevance/pddl.hpp"
#include "relevance/planner.hpp"
#include "relevance/search.hpp"

namespace relevance {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string domain = "coffee";
  std::string difficulty = "simple";
  std::uint64_t seed = 0;
  double tau_c = 0.2;
  double tau_e = 0.2;
  double tau_necessary = 0.9;
  double h_max_fraction = 0.5;
  double timeout = 120.0;
  std::size_t cases = 30;
  std::size_t gen_cases = 1;
  std::string provider = "table";
  std::string out;

  // per-command extras
  std::string scene_path;
  std::string table_path;
  std::string objective;
  std::vector<std::string> cues;
  std::string preferences_path;
  std::string human;
  std::string summary_path;
  std::vector<double> grid_c{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> grid_e{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::string> methods{"relevance", "pure_planning", "random_relevance"};
  std::size_t max_states = 4'000'000;
  std::size_t jobs = 1;
  bool deterministic_time = false;
  std::string scenario_path;
  std::string mode = "sync";
  std::size_t capacity = 64;
  bool pruned = false;

  Thresholds thresholds() const { return {tau_c, tau_e, tau_necessary, h_max_fraction}; }
};

const std::vector<std::string> kDomains{"coffee", "cereal"};
const std::vector<std::string> kDifficulties{"simple", "hard"};

void add_instance_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--domain", c.domain, "Benchmark domain")->check(CLI::IsMember(kDomains));
  sub->add_option("--difficulty", c.difficulty, "Instance difficulty")->check(CLI::IsMember(kDifficulties));
  sub->add_option("--seed", c.seed, "Base seed; case i uses seed + i");
}

void add_threshold_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--tau-c", c.tau_c, "Class threshold")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--tau-e", c.tau_e, "Element threshold")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--tau-necessary", c.tau_necessary, "Score at or above which an element is fetched unasked")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--h-max-fraction", c.h_max_fraction, "Entropy gate as a fraction of ln(task count)")
      ->check(CLI::Range(0.0, 1.0));
}

std::ostream& open_or(std::unique_ptr<std::ofstream>& file, const std::string& path, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file = std::make_unique<std::ofstream>(path);
  if (!*file) throw Error(ErrorKind::ParseError, "cannot write " + path);
  return *file;
}

std::string summary_path_for(const RunConfig& c) {
  if (!c.summary_path.empty()) return c.summary_path;
  fs::path p(c.out);
  return p.replace_extension(".summary.json").string();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_generate(const RunConfig& c, std::ostream& out) {
  const auto domain = parse_domain(c.domain);
  const auto difficulty = parse_difficulty(c.difficulty);
  for (std::size_t i = 0; i < c.gen_cases; ++i) {
    const auto inst = generate(domain, difficulty, c.seed + i);
    const auto dir = (fs::path(c.out) / inst.case_id()).string();
    write_instance_bundle(inst, dir);
    out << dir << '\n';
  }
  return 0;
}

int cmd_relevance(const RunConfig& c, std::ostream& out) {
  SceneRepresentation scene;
  ProbabilityTable table;
  CueSet cues;
  if (!c.scene_path.empty()) {
    if (c.table_path.empty()) throw Error(ErrorKind::ParseError, "--scene needs --table");
    scene = load_scene(c.scene_path);
    table = load_table(c.table_path);
  } else {
    auto inst = generate(parse_domain(c.domain), parse_difficulty(c.difficulty), c.seed);
    scene = std::move(inst.scene);
    table = std::move(inst.oracle_table);
    if (c.cues.empty())
      for (const auto& cue : inst.cues) cues.add(cue);
  }
  for (const auto& cue : c.cues) cues.add(cue);

  if (table.objectives.empty()) throw Error(ErrorKind::UnknownObjective, "table declares no objective");
  auto obj_it = c.objective.empty() ? table.objectives.begin() : table.objectives.find(c.objective);
  if (obj_it == table.objectives.end()) throw Error(ErrorKind::UnknownObjective, "unknown objective " + c.objective);
  const Objective objective = obj_it->second;

  auto shared = std::make_shared<const SceneRepresentation>(scene);
  std::unique_ptr<ProbabilityProvider> provider;
  if (c.provider == "table") {
    provider = std::make_unique<TableProvider>(shared, table);
  } else if (c.provider == "uniform") {
    provider = std::make_unique<UniformProvider>(shared, table.tasks);
  } else {
    auto cfg = ExternalConfig::from_environment();
    if (!cfg) throw Error(ErrorKind::EndpointUnreachable, "RELEVANCE_LLM_URL is not set");
    provider = std::make_unique<ExternalProvider>(shared, table.tasks, *cfg);
  }

  std::vector<Preference> prefs;
  if (!c.preferences_path.empty())
    for (const auto& p : load_preferences(c.preferences_path))
      if (c.human.empty() || p.human_id == c.human) prefs.push_back(p);

  const auto th = c.thresholds();
  const auto result = determine(scene, objective, table.tasks, *provider, cues, th, prefs);
  json doc = result_to_json(result);
  doc["objective"] = objective.id;
  doc["cues"] = cues.keys();
  if (result.sufficient()) {
    const auto part = necessity_partition(result, th);
    doc["necessary"] = part.necessary;
    doc["optional"] = part.optional;
    const auto decision = generate_decision(scene, result, prefs, th);
    doc["decision"] = {{"fetch", decision.fetch_actions},
                       {"inquiries", decision.inquiries},
                       {"declined", decision.declined}};
  }
  std::unique_ptr<std::ofstream> file;
  open_or(file, c.out, out) << doc.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  SweepConfig cfg;
  cfg.domain = parse_domain(c.domain);
  cfg.difficulty = parse_difficulty(c.difficulty);
  cfg.tau_c_grid = c.grid_c;
  cfg.tau_e_grid = c.grid_e;
  cfg.cases = c.cases;
  cfg.seed = c.seed;
  cfg.provider = parse_provider(c.provider);
  cfg.base = c.thresholds();
  const auto rows = sweep(cfg);
  const auto summary = sweep_summary_json(cfg, rows);
  if (c.out.empty()) {
    out << summary.dump(2) << '\n';
    return 0;
  }
  write_sweep_csv(rows, c.out);
  write_json(summary, summary_path_for(c));
  out << rows.size() << " rows -> " << c.out << '\n';
  return 0;
}

int cmd_plan_bench(const RunConfig& c, std::ostream& out) {
  BenchConfig cfg;
  cfg.domain = parse_domain(c.domain);
  cfg.difficulty = parse_difficulty(c.difficulty);
  cfg.methods.clear();
  for (const auto& m : c.methods) cfg.methods.push_back(parse_method(m));
  cfg.cases = c.cases;
  cfg.seed = c.seed;
  cfg.timeout_seconds = c.timeout;
  cfg.max_states = c.max_states;
  cfg.jobs = c.jobs;
  cfg.deterministic_time = c.deterministic_time;
  cfg.thresholds = c.thresholds();
  const auto report = planning_benchmark(cfg);
  const auto summary = bench_summary_json(cfg, report);
  if (c.out.empty()) {
    out << summary.dump(2) << '\n';
    return 0;
  }
  write_bench_csv(report, c.out);
  write_json(summary, summary_path_for(c));
  for (const auto& r : report.rows)
    out << to_string(r.method) << ": mean_time=" << (r.mean_time ? fmt(*r.mean_time) : "-")
        << " timeout=" << fmt(r.timeout_rate)
        << " failure=" << (r.failure_applicable ? fmt(r.failure_rate) : "n/a") << '\n';
  return 0;
}

int cmd_inquiry_bench(const RunConfig& c, std::ostream& out) {
  const auto report =
      inquiry_benchmark(parse_domain(c.domain), parse_difficulty(c.difficulty), c.cases, c.seed, c.thresholds());
  std::unique_ptr<std::ofstream> file;
  open_or(file, c.out, out) << inquiry_json(report).dump(2) << '\n';
  return 0;
}

int cmd_run_scenario(const RunConfig& c, std::ostream& out) {
  const bool demo = c.scenario_path.empty();
  const auto scenario = demo ? coffee_demo_scenario() : load_scenario(c.scenario_path);

  SceneRepresentation scene;
  ProbabilityTable table;
  if (!c.scene_path.empty()) {
    if (c.table_path.empty()) throw Error(ErrorKind::ParseError, "--scene needs --table");
    scene = load_scene(c.scene_path);
    table = load_table(c.table_path);
  } else {
    auto inst = coffee_reference_instance();
    scene = std::move(inst.scene);
    table = std::move(inst.oracle_table);
  }
  std::vector<Preference> prefs;
  if (!c.preferences_path.empty())
    prefs = load_preferences(c.preferences_path);
  else if (demo)
    prefs = coffee_demo_preferences("alice");

  auto shared = std::make_shared<const SceneRepresentation>(scene);
  const TableProvider provider(shared, table);
  const PipelineConfig cfg{*shared, provider, table.tasks, table.objectives, c.thresholds(), prefs};
  PipelineOptions options;
  options.mode = c.mode == "concurrent" ? PipelineMode::Concurrent : PipelineMode::Synchronous;
  options.channel_capacity = c.capacity;
  const auto log = run_pipeline(scenario, cfg, options);
  std::unique_ptr<std::ofstream> file;
  open_or(file, c.out, out) << log.to_jsonl();
  return 0;
}

int cmd_export_pddl(const RunConfig& c, std::ostream& out) {
  const auto inst = generate(parse_domain(c.domain), parse_difficulty(c.difficulty), c.seed);
  auto problem = compile(inst);
  if (c.pruned) {
    auto shared = std::make_shared<const SceneRepresentation>(inst.scene);
    const TableProvider provider(shared, inst.oracle_table);
    CueSet cues;
    for (const auto& cue : inst.cues) cues.add(cue);
    const auto result = determine(inst.scene, inst.objective, inst.tasks, provider, cues, c.thresholds());
    if (!result.sufficient()) throw Error(ErrorKind::InsufficientResult, "relevance is insufficient for pruning");
    problem = prune(problem, result.closed_elements);
  }
  const auto text = export_pddl(problem);
  if (c.out.empty()) {
    out << text.domain << '\n' << text.problem << '\n';
    return 0;
  }
  fs::create_directories(c.out);
  std::ofstream(fs::path(c.out) / "domain.pddl") << text.domain;
  std::ofstream(fs::path(c.out) / "problem.pddl") << text.problem;
  out << (fs::path(c.out) / "domain.pddl").string() << '\n' << (fs::path(c.out) / "problem.pddl").string() << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Relevance determination engine and benchmark harness", "relevance_cli"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write benchmark instance bundles (scene, table, goal)");
  add_instance_flags(gen, c);
  gen->add_option("--cases", c.gen_cases, "Number of instances")->check(CLI::PositiveNumber);
  gen->add_option("--out", c.out, "Output directory")->required();

  auto* rel = app.add_subcommand("relevance", "Determine relevant elements for one scene");
  add_instance_flags(rel, c);
  add_threshold_flags(rel, c);
  rel->add_option("--scene", c.scene_path, "Scene JSON (otherwise a generated instance is used)");
  rel->add_option("--table", c.table_path, "Probability table JSON");
  rel->add_option("--objective", c.objective, "Objective id (default: first in the table)");
  rel->add_option("--cue", c.cues, "Observed cue key, repeatable");
  rel->add_option("--preferences", c.preferences_path, "Preferences JSON");
  rel->add_option("--human", c.human, "Only apply this person's preferences");
  rel->add_option("--provider", c.provider, "Probability source")
      ->check(CLI::IsMember({"table", "uniform", "external"}));
  rel->add_option("--out", c.out, "Write the result here instead of standard output");

  auto* sw = app.add_subcommand("sweep", "Precision/recall sweep over the threshold grid");
  add_instance_flags(sw, c);
  add_threshold_flags(sw, c);
  sw->add_option("--cases", c.cases, "Seeds per grid cell")->check(CLI::PositiveNumber);
  sw->add_option("--provider", c.provider, "Probability source")->check(CLI::IsMember({"table", "uniform"}));
  sw->add_option("--grid-c", c.grid_c, "Class threshold grid")->check(CLI::Range(0.0, 1.0));
  sw->add_option("--grid-e", c.grid_e, "Element threshold grid")->check(CLI::Range(0.0, 1.0));
  sw->add_option("--out", c.out, "CSV with one row per (cell, case); summary JSON goes next to it");
  sw->add_option("--summary", c.summary_path, "Summary JSON path");

  auto* pb = app.add_subcommand("plan-bench", "Planning benchmark: relevance vs pure vs random pruning");
  add_instance_flags(pb, c);
  add_threshold_flags(pb, c);
  pb->add_option("--cases", c.cases, "Instances")->check(CLI::PositiveNumber);
  pb->add_option("--timeout", c.timeout, "Per-case timeout in seconds")->check(CLI::PositiveNumber);
  pb->add_option("--max-states", c.max_states, "Stored-state budget per search (0 = unlimited)");
  pb->add_option("--jobs", c.jobs, "Concurrent cases")->check(CLI::PositiveNumber);
  pb->add_flag("--deterministic-time", c.deterministic_time,
               "Report expansions x 1e-5 s instead of wall-clock time");
  pb->add_option("--methods", c.methods, "Subset of relevance, pure_planning, random_relevance")
      ->check(CLI::IsMember({"relevance", "pure_planning", "random_relevance", "pure", "random"}));
  pb->add_option("--out", c.out, "CSV with one row per method; summary JSON goes next to it");
  pb->add_option("--summary", c.summary_path, "Summary JSON path");

  auto* ib = app.add_subcommand("inquiry-bench", "Count inquiries with and without relevance");
  add_instance_flags(ib, c);
  add_threshold_flags(ib, c);
  ib->add_option("--cases", c.cases, "Instances")->check(CLI::PositiveNumber);
  ib->add_option("--out", c.out, "Write the JSON summary here instead of standard output");

  auto* rs = app.add_subcommand("run-scenario", "Replay feature snapshots through the event pipeline");
  add_threshold_flags(rs, c);
  rs->add_option("--scenario", c.scenario_path, "Scenario JSON (default: built-in two-person coffee demo)");
  rs->add_option("--scene", c.scene_path, "Scene JSON (default: coffee reference scene)");
  rs->add_option("--table", c.table_path, "Probability table JSON");
  rs->add_option("--preferences", c.preferences_path, "Preferences JSON");
  rs->add_option("--mode", c.mode, "Pipeline mode")->check(CLI::IsMember({"sync", "concurrent"}));
  rs->add_option("--capacity", c.capacity, "Channel capacity in concurrent mode")->check(CLI::PositiveNumber);
  rs->add_option("--out", c.out, "Episode log (JSON lines) path; default standard output");

  auto* ex = app.add_subcommand("export-pddl", "Write the planning problem of a generated instance as PDDL");
  add_instance_flags(ex, c);
  add_threshold_flags(ex, c);
  ex->add_flag("--pruned", c.pruned, "Prune to the relevant closure first");
  ex->add_option("--out", c.out, "Directory for domain.pddl and problem.pddl");

  auto synopsis = [&]() -> std::string {
    for (auto* sub : app.get_subcommands()) return sub->help();
    return app.help();
  };

  try {
    app.parse(argc, argv);
    c.thresholds().validate();
  } catch (const CLI::CallForHelp&) {
    out << synopsis();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << synopsis();
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n\n" << synopsis();
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_generate(c, out);
    if (rel->parsed()) return cmd_relevance(c, out);
    if (sw->parsed()) return cmd_sweep(c, out);
    if (pb->parsed()) return cmd_plan_bench(c, out);
    if (ib->parsed()) return cmd_inquiry_bench(c, out);
    if (rs->parsed()) return cmd_run_scenario(c, out);
    if (ex->parsed()) return cmd_export_pddl(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace relevance
