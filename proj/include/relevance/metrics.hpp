#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relevance/generators.hpp"
#include "relevance/relevance.hpp"
#include "relevance/search.hpp"

namespace relevance {

struct MetricScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double object_ratio = 0.0;
};

/// Empty prediction scores precision 1 and recall 0. Throws EmptyTruth.
MetricScores score_prediction(const IdSet& predicted, const IdSet& truth);

enum class ProviderKind { Table, Uniform };
std::string_view to_string(ProviderKind kind);
ProviderKind parse_provider(std::string_view text);

struct MetricRow {
  std::string case_id;
  std::uint64_t seed = 0;
  double tau_c = 0.0;
  double tau_e = 0.0;
  bool sufficient = true;
  MetricScores scores;
  double object_ratio_closed = 0.0;  // with E_r replaced by its closure
  std::size_t predicted = 0;
  std::size_t predicted_closed = 0;
  std::size_t truth = 0;
};

struct SweepConfig {
  DomainKind domain = DomainKind::Coffee;
  Difficulty difficulty = Difficulty::Simple;
  std::vector<double> tau_c_grid{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> tau_e_grid{0.1, 0.2, 0.3, 0.4, 0.5};
  std::size_t cases = 30;
  std::uint64_t seed = 0;  // case i uses seed + i
  ProviderKind provider = ProviderKind::Table;
  Thresholds base;  // tau_necessary and h_max_fraction
};

/// One row per (tau_c, tau_e, case); the same instances are reused in every cell.
std::vector<MetricRow> sweep(const SweepConfig& config);

struct CellSummary {
  double tau_c = 0.0;
  double tau_e = 0.0;
  std::size_t cases = 0;
  MetricScores mean;
  double mean_object_ratio_closed = 0.0;
};

std::vector<CellSummary> summarize_sweep(const std::vector<MetricRow>& rows);

/// Element name -> number of cases whose E_r contains an element of that name.
std::map<std::string, std::size_t> element_frequency(DomainKind domain, Difficulty difficulty, double tau_c,
                                                     double tau_e, std::size_t n_cases, std::uint64_t seed = 0);

enum class Method { Relevance, PurePlanning, RandomRelevance };
std::string_view to_string(Method method);
Method parse_method(std::string_view text);

enum class CaseOutcome { Solved, Timeout, Failure };
std::string_view to_string(CaseOutcome outcome);

struct BenchCase {
  std::string case_id;
  Method method = Method::Relevance;
  CaseOutcome outcome = CaseOutcome::Solved;
  std::string detail;  // limit reason or failure cause
  double seconds = 0.0;
  std::size_t objects = 0;  // scene objects handed to the planner
  std::size_t plan_length = 0;
  std::size_t expanded = 0;
};

struct BenchRow {
  Method method = Method::Relevance;
  DomainKind domain = DomainKind::Coffee;
  Difficulty difficulty = Difficulty::Simple;
  std::size_t n_cases = 0;
  std::optional<double> mean_time;  // over solved cases only
  double timeout_rate = 0.0;
  double failure_rate = 0.0;
  double success_rate = 0.0;
  bool failure_applicable = true;  // false for pure planning
};

struct BenchConfig {
  DomainKind domain = DomainKind::Coffee;
  Difficulty difficulty = Difficulty::Simple;
  std::vector<Method> methods{Method::Relevance, Method::PurePlanning, Method::RandomRelevance};
  std::size_t cases = 30;
  std::uint64_t seed = 0;
  double timeout_seconds = 120.0;
  std::size_t max_states = 4'000'000;
  std::size_t jobs = 1;
  /// Replace wall-clock durations with an expansion count scaled by
  /// kSyntheticSecondsPerExpansion; the timeout becomes an expansion budget.
  bool deterministic_time = false;
  Thresholds thresholds;
};

inline constexpr double kSyntheticSecondsPerExpansion = 1e-5;

struct BenchReport {
  std::vector<BenchCase> cases;  // ordered by (case index, method)
  std::vector<BenchRow> rows;    // one per method
};

BenchReport planning_benchmark(const BenchConfig& config);
BenchCase run_bench_case(const ProblemInstance& instance, Method method, const BenchConfig& config);
std::vector<BenchRow> aggregate(const std::vector<BenchCase>& cases, const BenchConfig& config);

struct InquiryCounts {
  std::size_t objects = 0;         // asking about everything
  std::size_t relevant_types = 0;  // types in E_r
  std::size_t optional_types = 0;  // types in E_r that are not necessary
};

InquiryCounts inquiry_counts(const ProblemInstance& instance, const Thresholds& thresholds);

struct InquiryReport {
  std::size_t n_cases = 0;
  double mean_objects = 0.0;
  double mean_relevant_types = 0.0;
  double mean_optional_types = 0.0;
  double reduction_relevance = 0.0;  // 1 - relevant / objects
  double reduction_necessity = 0.0;  // 1 - optional / objects
  InquiryCounts reference;           // coffee reference scene
};

InquiryReport inquiry_benchmark(DomainKind domain, Difficulty difficulty, std::size_t n_cases,
                                std::uint64_t seed, const Thresholds& thresholds);

void write_sweep_csv(const std::vector<MetricRow>& rows, const std::string& path);
nlohmann::json sweep_summary_json(const SweepConfig& config, const std::vector<MetricRow>& rows);
void write_bench_csv(const BenchReport& report, const std::string& path);
nlohmann::json bench_summary_json(const BenchConfig& config, const BenchReport& report);
nlohmann::json inquiry_json(const InquiryReport& report);

/// Writes `doc` to path with a trailing newline.
void write_json(const nlohmann::json& doc, const std::string& path);

}  // namespace relevance
