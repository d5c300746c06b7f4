#include "relevance/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "relevance/error.hpp"
#include "relevance/planner.hpp"
#include "relevance/rng.hpp"

namespace relevance {

using nlohmann::json;

MetricScores score_prediction(const IdSet& predicted, const IdSet& truth) {
  if (truth.empty()) throw Error(ErrorKind::EmptyTruth, "ground truth set is empty");
  std::size_t hits = 0;
  for (const auto& id : predicted) hits += truth.contains(id);
  MetricScores s;
  s.precision = predicted.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(predicted.size());
  s.recall = static_cast<double>(hits) / static_cast<double>(truth.size());
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  s.object_ratio = static_cast<double>(predicted.size()) / static_cast<double>(truth.size());
  return s;
}

std::string_view to_string(ProviderKind kind) { return kind == ProviderKind::Table ? "table" : "uniform"; }

ProviderKind parse_provider(std::string_view text) {
  if (text == "table") return ProviderKind::Table;
  if (text == "uniform") return ProviderKind::Uniform;
  throw Error(ErrorKind::ParseError, "unknown provider '" + std::string(text) + "'");
}

namespace {

std::unique_ptr<ProbabilityProvider> make_provider(const ProblemInstance& inst, ProviderKind kind) {
  auto scene = std::make_shared<const SceneRepresentation>(inst.scene);
  if (kind == ProviderKind::Uniform) return std::make_unique<UniformProvider>(scene, inst.tasks);
  return std::make_unique<TableProvider>(scene, inst.oracle_table);
}

CueSet declared_cues(const ProblemInstance& inst) {
  CueSet cues;
  for (const auto& c : inst.cues) cues.add(c);
  return cues;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<MetricRow> sweep(const SweepConfig& config) {
  std::vector<ProblemInstance> instances;
  std::vector<std::unique_ptr<ProbabilityProvider>> providers;
  for (std::size_t i = 0; i < config.cases; ++i) {
    instances.push_back(generate(config.domain, config.difficulty, config.seed + i));
    providers.push_back(make_provider(instances.back(), config.provider));
  }

  std::vector<MetricRow> rows;
  for (double tc : config.tau_c_grid)
    for (double te : config.tau_e_grid) {
      Thresholds th = config.base;
      th.tau_c = tc;
      th.tau_e = te;
      th.tau_necessary = std::max(th.tau_necessary, te);
      for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        const auto result = determine(inst.scene, inst.objective, inst.tasks, *providers[i], declared_cues(inst), th);
        MetricRow row;
        row.case_id = inst.case_id();
        row.seed = inst.seed;
        row.tau_c = tc;
        row.tau_e = te;
        row.sufficient = result.sufficient();
        row.scores = score_prediction(result.relevant_elements, inst.ground_truth_relevant);
        row.object_ratio_closed = static_cast<double>(result.closed_elements.size()) /
                                  static_cast<double>(inst.ground_truth_relevant.size());
        row.predicted = result.relevant_elements.size();
        row.predicted_closed = result.closed_elements.size();
        row.truth = inst.ground_truth_relevant.size();
        rows.push_back(std::move(row));
      }
    }
  return rows;
}

std::vector<CellSummary> summarize_sweep(const std::vector<MetricRow>& rows) {
  std::vector<CellSummary> cells;
  for (const auto& r : rows) {
    auto it = std::find_if(cells.begin(), cells.end(),
                           [&](const CellSummary& c) { return c.tau_c == r.tau_c && c.tau_e == r.tau_e; });
    if (it == cells.end()) {
      cells.push_back({r.tau_c, r.tau_e, 0, {}, 0.0});
      it = std::prev(cells.end());
    }
    ++it->cases;
    it->mean.precision += r.scores.precision;
    it->mean.recall += r.scores.recall;
    it->mean.f1 += r.scores.f1;
    it->mean.object_ratio += r.scores.object_ratio;
    it->mean_object_ratio_closed += r.object_ratio_closed;
  }
  for (auto& c : cells) {
    const double n = static_cast<double>(c.cases);
    c.mean.precision /= n;
    c.mean.recall /= n;
    c.mean.f1 /= n;
    c.mean.object_ratio /= n;
    c.mean_object_ratio_closed /= n;
  }
  return cells;
}

std::map<std::string, std::size_t> element_frequency(DomainKind domain, Difficulty difficulty, double tau_c,
                                                     double tau_e, std::size_t n_cases, std::uint64_t seed) {
  std::map<std::string, std::size_t> counts;
  Thresholds th;
  th.tau_c = tau_c;
  th.tau_e = tau_e;
  th.tau_necessary = std::max(th.tau_necessary, tau_e);
  for (std::size_t i = 0; i < n_cases; ++i) {
    const auto inst = generate(domain, difficulty, seed + i);
    const auto provider = make_provider(inst, ProviderKind::Table);
    const auto result = determine(inst.scene, inst.objective, inst.tasks, *provider, declared_cues(inst), th);
    std::set<std::string> names;
    for (const auto& id : result.relevant_elements) names.insert(inst.scene.element(id).name);
    for (const auto& n : names) ++counts[n];
  }
  return counts;
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Relevance: return "relevance";
    case Method::PurePlanning: return "pure_planning";
    case Method::RandomRelevance: return "random_relevance";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "relevance") return Method::Relevance;
  if (text == "pure_planning" || text == "pure") return Method::PurePlanning;
  if (text == "random_relevance" || text == "random") return Method::RandomRelevance;
  throw Error(ErrorKind::ParseError, "unknown method '" + std::string(text) + "'");
}

std::string_view to_string(CaseOutcome outcome) {
  switch (outcome) {
    case CaseOutcome::Solved: return "solved";
    case CaseOutcome::Timeout: return "timeout";
    case CaseOutcome::Failure: return "failure";
  }
  return "?";
}

BenchCase run_bench_case(const ProblemInstance& inst, Method method, const BenchConfig& config) {
  using Clock = std::chrono::steady_clock;
  BenchCase out;
  out.case_id = inst.case_id();
  out.method = method;

  const auto full = compile(inst);
  SearchLimits limits;
  limits.max_states = config.max_states;
  if (config.deterministic_time) {
    limits.timeout_seconds = std::numeric_limits<double>::infinity();
    limits.max_expansions = static_cast<std::size_t>(config.timeout_seconds / kSyntheticSecondsPerExpansion);
  } else {
    limits.timeout_seconds = config.timeout_seconds;
  }

  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  auto fail = [&](std::string why) {
    out.outcome = CaseOutcome::Failure;
    out.detail = std::move(why);
    out.seconds = config.deterministic_time ? 0.0 : elapsed();
    return out;
  };

  PlanningProblem pruned;
  const PlanningProblem* problem = &full;
  if (method != Method::PurePlanning) {
    RelevanceResult result;
    if (method == Method::Relevance) {
      const auto provider = make_provider(inst, ProviderKind::Table);
      result = determine(inst.scene, inst.objective, inst.tasks, *provider, declared_cues(inst), config.thresholds);
      if (!result.sufficient()) return fail("insufficient");
    } else {
      Rng rng(mix_seed(inst.seed, 0x5EED));
      std::map<ClassId, double> class_scores;
      for (const auto& cls : inst.scene.classes()) class_scores[cls.id] = rng.uniform01();
      result = select_relevant(inst.scene, std::move(class_scores),
                               [&](const Element&, double) { return rng.uniform01(); }, config.thresholds);
    }
    try {
      pruned = prune(full, result.closed_elements);
    } catch (const Error& ex) {
      if (ex.kind() != ErrorKind::GoalPruned) throw;
      return fail("goal_pruned");
    }
    problem = &pruned;
    if (!config.deterministic_time) limits.timeout_seconds = std::max(0.0, config.timeout_seconds - elapsed());
  }
  for (const auto& o : problem->objects)
    out.objects += inst.scene.contains(o.name);

  const auto r = solve(*problem, limits);
  out.expanded = r.stats.expanded;
  out.seconds = config.deterministic_time ? static_cast<double>(r.stats.expanded) * kSyntheticSecondsPerExpansion
                                          : elapsed();
  switch (r.status) {
    case SolveStatus::Solved:
      out.outcome = CaseOutcome::Solved;
      out.plan_length = r.plan->cost();
      break;
    case SolveStatus::Timeout:
      out.outcome = CaseOutcome::Timeout;
      out.detail = std::string(to_string(r.limit));
      break;
    case SolveStatus::Unsolvable:
      out.outcome = CaseOutcome::Failure;
      out.detail = "unsolvable";
      break;
  }
  return out;
}

std::vector<BenchRow> aggregate(const std::vector<BenchCase>& cases, const BenchConfig& config) {
  std::vector<BenchRow> rows;
  for (auto m : config.methods) {
    BenchRow row;
    row.method = m;
    row.domain = config.domain;
    row.difficulty = config.difficulty;
    row.failure_applicable = m != Method::PurePlanning;
    std::size_t solved = 0, timeouts = 0, failures = 0;
    double total = 0.0;
    for (const auto& c : cases) {
      if (c.method != m) continue;
      ++row.n_cases;
      if (c.outcome == CaseOutcome::Solved) {
        ++solved;
        total += c.seconds;
      } else if (c.outcome == CaseOutcome::Timeout) {
        ++timeouts;
      } else {
        ++failures;
      }
    }
    if (row.n_cases > 0) {
      const double n = static_cast<double>(row.n_cases);
      row.timeout_rate = static_cast<double>(timeouts) / n;
      row.failure_rate = static_cast<double>(failures) / n;
      row.success_rate = static_cast<double>(solved) / n;
    }
    if (solved > 0) row.mean_time = total / static_cast<double>(solved);
    rows.push_back(row);
  }
  return rows;
}

BenchReport planning_benchmark(const BenchConfig& config) {
  if (config.cases == 0) throw Error(ErrorKind::InvalidThresholds, "planning benchmark needs at least one case");
  std::vector<ProblemInstance> instances;
  for (std::size_t i = 0; i < config.cases; ++i)
    instances.push_back(generate(config.domain, config.difficulty, config.seed + i));

  const std::size_t n_methods = config.methods.size();
  BenchReport report;
  report.cases.resize(instances.size() * n_methods);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t task; (task = next++) < report.cases.size();) {
      try {
        report.cases[task] = run_bench_case(instances[task / n_methods], config.methods[task % n_methods], config);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const auto jobs = std::max<std::size_t>(1, std::min(config.jobs, report.cases.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  report.rows = aggregate(report.cases, config);
  return report;
}

InquiryCounts inquiry_counts(const ProblemInstance& inst, const Thresholds& thresholds) {
  const auto provider = make_provider(inst, ProviderKind::Table);
  const auto result = determine(inst.scene, inst.objective, inst.tasks, *provider, declared_cues(inst), thresholds);
  InquiryCounts c;
  c.objects = inst.scene.elements().size();
  if (!result.sufficient()) {
    c.relevant_types = c.optional_types = c.objects;
    return c;
  }
  const auto partition = necessity_partition(result, thresholds);
  std::set<std::string> relevant, necessary, optional;
  for (const auto& id : result.relevant_elements) relevant.insert(inst.scene.element(id).type());
  for (const auto& id : partition.necessary) necessary.insert(inst.scene.element(id).type());
  for (const auto& id : partition.optional)
    if (!necessary.contains(inst.scene.element(id).type())) optional.insert(inst.scene.element(id).type());
  c.relevant_types = relevant.size();
  c.optional_types = optional.size();
  return c;
}

InquiryReport inquiry_benchmark(DomainKind domain, Difficulty difficulty, std::size_t n_cases, std::uint64_t seed,
                                const Thresholds& thresholds) {
  InquiryReport r;
  r.n_cases = n_cases;
  for (std::size_t i = 0; i < n_cases; ++i) {
    const auto c = inquiry_counts(generate(domain, difficulty, seed + i), thresholds);
    r.mean_objects += static_cast<double>(c.objects);
    r.mean_relevant_types += static_cast<double>(c.relevant_types);
    r.mean_optional_types += static_cast<double>(c.optional_types);
  }
  if (n_cases > 0) {
    const double n = static_cast<double>(n_cases);
    r.mean_objects /= n;
    r.mean_relevant_types /= n;
    r.mean_optional_types /= n;
    r.reduction_relevance = 1.0 - r.mean_relevant_types / r.mean_objects;
    r.reduction_necessity = 1.0 - r.mean_optional_types / r.mean_objects;
  }
  r.reference = inquiry_counts(coffee_reference_instance(), thresholds);
  return r;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path);
  return out;
}

}  // namespace

void write_json(const json& doc, const std::string& path) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

void write_sweep_csv(const std::vector<MetricRow>& rows, const std::string& path) {
  auto out = open_out(path);
  out << "case_id,seed,tau_c,tau_e,sufficient,precision,recall,f1,object_ratio,object_ratio_closed,"
         "predicted,predicted_closed,truth\n";
  for (const auto& r : rows)
    out << r.case_id << ',' << r.seed << ',' << fixed(r.tau_c, 2) << ',' << fixed(r.tau_e, 2) << ','
        << (r.sufficient ? 1 : 0) << ',' << fixed(r.scores.precision) << ',' << fixed(r.scores.recall) << ','
        << fixed(r.scores.f1) << ',' << fixed(r.scores.object_ratio) << ',' << fixed(r.object_ratio_closed) << ','
        << r.predicted << ',' << r.predicted_closed << ',' << r.truth << '\n';
}

json sweep_summary_json(const SweepConfig& config, const std::vector<MetricRow>& rows) {
  json cells = json::array();
  for (const auto& c : summarize_sweep(rows))
    cells.push_back({{"tau_c", c.tau_c},
                     {"tau_e", c.tau_e},
                     {"cases", c.cases},
                     {"precision", c.mean.precision},
                     {"recall", c.mean.recall},
                     {"f1", c.mean.f1},
                     {"object_ratio", c.mean.object_ratio},
                     {"object_ratio_closed", c.mean_object_ratio_closed}});
  return {{"domain", to_string(config.domain)},
          {"difficulty", to_string(config.difficulty)},
          {"provider", to_string(config.provider)},
          {"seed", config.seed},
          {"cases_per_cell", config.cases},
          {"rows", rows.size()},
          {"cells", cells}};
}

void write_bench_csv(const BenchReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "method,domain,difficulty,n_cases,mean_time,timeout_rate,failure_rate,success_rate\n";
  for (const auto& r : report.rows)
    out << to_string(r.method) << ',' << to_string(r.domain) << ',' << to_string(r.difficulty) << ',' << r.n_cases
        << ',' << (r.mean_time ? fixed(*r.mean_time) : std::string("")) << ',' << fixed(r.timeout_rate, 4) << ','
        << (r.failure_applicable ? fixed(r.failure_rate, 4) : std::string("n/a")) << ','
        << fixed(r.success_rate, 4) << '\n';
}

json bench_summary_json(const BenchConfig& config, const BenchReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"method", to_string(r.method)},
                    {"n_cases", r.n_cases},
                    {"mean_time", r.mean_time ? json(*r.mean_time) : json(nullptr)},
                    {"timeout_rate", r.timeout_rate},
                    {"failure_rate", r.failure_applicable ? json(r.failure_rate) : json(nullptr)},
                    {"success_rate", r.success_rate}});
  json cases = json::array();
  for (const auto& c : report.cases)
    cases.push_back({{"case_id", c.case_id},
                     {"method", to_string(c.method)},
                     {"outcome", to_string(c.outcome)},
                     {"detail", c.detail},
                     {"seconds", c.seconds},
                     {"objects", c.objects},
                     {"plan_length", c.plan_length},
                     {"expanded", c.expanded}});
  return {{"domain", to_string(config.domain)},
          {"difficulty", to_string(config.difficulty)},
          {"seed", config.seed},
          {"timeout_seconds", config.timeout_seconds},
          {"max_states", config.max_states},
          {"deterministic_time", config.deterministic_time},
          {"tau_c", config.thresholds.tau_c},
          {"tau_e", config.thresholds.tau_e},
          {"rows", rows},
          {"cases", cases}};
}

json inquiry_json(const InquiryReport& r) {
  return {{"n_cases", r.n_cases},
          {"mean_objects", r.mean_objects},
          {"mean_relevant_types", r.mean_relevant_types},
          {"mean_optional_types", r.mean_optional_types},
          {"reduction_relevance", r.reduction_relevance},
          {"reduction_necessity", r.reduction_necessity},
          {"reference",
           {{"objects", r.reference.objects},
            {"relevant_types", r.reference.relevant_types},
            {"optional_types", r.reference.optional_types}}}};
}

}  // namespace relevance
