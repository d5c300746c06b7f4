#include <filesystem>
#include <fstream>
#include <numeric>

#include <doctest.h>

#include "helpers.hpp"
#include "relevance/metrics.hpp"

using namespace relevance;

namespace {

std::string first_line(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "relevance_unit_metrics";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("scores follow their definitions") {
    const IdSet truth{"a", "b", "c", "d"};
    const auto s = score_prediction({"a", "b", "x"}, truth);
    CHECK(s.precision == doctest::Approx(2.0 / 3.0));
    CHECK(s.recall == doctest::Approx(0.5));
    CHECK(s.f1 == doctest::Approx(2 * (2.0 / 3.0) * 0.5 / (2.0 / 3.0 + 0.5)));
    CHECK(s.object_ratio == doctest::Approx(0.75));

    const auto exact = score_prediction(truth, truth);
    CHECK(exact.f1 == doctest::Approx(1.0));
    CHECK(exact.object_ratio == doctest::Approx(1.0));

    const auto none = score_prediction({}, truth);
    CHECK(none.precision == doctest::Approx(1.0));
    CHECK(none.recall == doctest::Approx(0.0));
    CHECK(none.f1 == doctest::Approx(0.0));

    const auto wrong = score_prediction({"x"}, truth);
    CHECK(wrong.precision == 0.0);
    CHECK(wrong.f1 == 0.0);

    CHECK_ERROR_KIND(score_prediction({"a"}, {}), ErrorKind::EmptyTruth);
  }

  TEST_CASE("enum names round trip") {
    for (auto m : {Method::Relevance, Method::PurePlanning, Method::RandomRelevance}) CHECK(parse_method(to_string(m)) == m);
    for (auto p : {ProviderKind::Table, ProviderKind::Uniform}) CHECK(parse_provider(to_string(p)) == p);
    CHECK_THROWS_AS(parse_method("magic"), Error);
  }

  TEST_CASE("sweep covers the grid over the same instances") {
    SweepConfig cfg;
    cfg.cases = 4;
    const auto rows = sweep(cfg);
    REQUIRE(rows.size() == 25 * 4);
    std::set<std::string> ids;
    for (const auto& r : rows) ids.insert(r.case_id);
    CHECK(ids.size() == 4);
    for (const auto& r : rows) {
      CHECK(r.truth > 0);
      CHECK(r.predicted_closed >= r.predicted);
      CHECK(r.object_ratio_closed >= r.scores.object_ratio - 1e-12);
    }
    const auto cells = summarize_sweep(rows);
    REQUIRE(cells.size() == 25);
    for (const auto& c : cells) CHECK(c.cases == 4);

    // A cell mean is the plain average of its rows.
    double f = 0.0;
    for (const auto& r : rows)
      if (r.tau_c == cells[7].tau_c && r.tau_e == cells[7].tau_e) f += r.scores.f1;
    CHECK(cells[7].mean.f1 == doctest::Approx(f / 4.0));

    // Raising tau_e never adds elements in the same instance.
    for (const auto& a : rows)
      for (const auto& b : rows)
        if (a.case_id == b.case_id && a.tau_c == b.tau_c && a.tau_e < b.tau_e && a.sufficient && b.sufficient)
          CHECK(b.predicted <= a.predicted);

    const auto path = scratch("sweep.csv");
    write_sweep_csv(rows, path);
    CHECK(first_line(path) ==
          "case_id,seed,tau_c,tau_e,sufficient,precision,recall,f1,object_ratio,object_ratio_closed,predicted,"
          "predicted_closed,truth");
    CHECK(line_count(path) == rows.size() + 1);
    CHECK(sweep_summary_json(cfg, rows)["cells"].size() == 25);
  }

  TEST_CASE("uniform provider is insufficient everywhere") {
    SweepConfig cfg;
    cfg.cases = 2;
    cfg.provider = ProviderKind::Uniform;
    cfg.tau_c_grid = {0.2};
    cfg.tau_e_grid = {0.2};
    for (const auto& r : sweep(cfg)) CHECK_FALSE(r.sufficient);
  }

  TEST_CASE("bench rates partition the cases and deterministic time reproduces") {
    BenchConfig cfg;
    cfg.cases = 3;
    cfg.seed = 11;
    cfg.timeout_seconds = 2.0;
    cfg.deterministic_time = true;
    const auto a = planning_benchmark(cfg);
    REQUIRE(a.cases.size() == 9);
    REQUIRE(a.rows.size() == 3);
    for (const auto& row : a.rows) {
      CHECK(row.n_cases == 3);
      CHECK(row.timeout_rate + row.failure_rate + row.success_rate == doctest::Approx(1.0));
      CHECK(row.failure_applicable == (row.method != Method::PurePlanning));
      if (!row.failure_applicable) CHECK(row.failure_rate == 0.0);
    }
    for (const auto& row : a.rows)
      if (row.method == Method::Relevance) CHECK(row.success_rate == doctest::Approx(1.0));
    for (const auto& c : a.cases)
      if (c.outcome == CaseOutcome::Solved) CHECK(c.seconds == doctest::Approx(c.expanded * kSyntheticSecondsPerExpansion));

    cfg.jobs = 3;
    const auto b = planning_benchmark(cfg);
    REQUIRE(b.cases.size() == a.cases.size());
    for (std::size_t i = 0; i < a.cases.size(); ++i) {
      CHECK(a.cases[i].case_id == b.cases[i].case_id);
      CHECK(a.cases[i].method == b.cases[i].method);
      CHECK(a.cases[i].outcome == b.cases[i].outcome);
      CHECK(a.cases[i].seconds == b.cases[i].seconds);
    }
    CHECK(bench_summary_json(cfg, a).dump() == bench_summary_json(cfg, b).dump());

    const auto path = scratch("bench.csv");
    write_bench_csv(a, path);
    CHECK(first_line(path) == "method,domain,difficulty,n_cases,mean_time,timeout_rate,failure_rate,success_rate");
    CHECK(line_count(path) == 4);
  }

  TEST_CASE("aggregate counts outcomes and averages solved times") {
    BenchConfig cfg;
    cfg.methods = {Method::Relevance};
    std::vector<BenchCase> cases{
        {"a", Method::Relevance, CaseOutcome::Solved, "", 1.0},
        {"b", Method::Relevance, CaseOutcome::Solved, "", 3.0},
        {"c", Method::Relevance, CaseOutcome::Timeout, "wall_clock", 120.0},
        {"d", Method::Relevance, CaseOutcome::Failure, "insufficient", 0.0},
    };
    const auto rows = aggregate(cases, cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_cases == 4);
    CHECK(rows[0].mean_time == doctest::Approx(2.0));
    CHECK(rows[0].timeout_rate == doctest::Approx(0.25));
    CHECK(rows[0].failure_rate == doctest::Approx(0.25));
    CHECK(rows[0].success_rate == doctest::Approx(0.5));

    cases.resize(3);
    cases.erase(cases.begin(), cases.begin() + 2);
    CHECK_FALSE(aggregate(cases, cfg)[0].mean_time.has_value());
  }

  TEST_CASE("inquiry counts shrink from objects to optional types") {
    const auto report = inquiry_benchmark(DomainKind::Coffee, Difficulty::Simple, 3, 0, {});
    CHECK(report.n_cases == 3);
    CHECK(report.mean_optional_types <= report.mean_relevant_types);
    CHECK(report.mean_relevant_types < report.mean_objects);
    CHECK(report.reduction_relevance == doctest::Approx(1.0 - report.mean_relevant_types / report.mean_objects));
    CHECK(report.reduction_necessity >= report.reduction_relevance);
    CHECK(report.reference.objects > report.reference.relevant_types);
    CHECK(inquiry_json(report).contains("reference"));
  }
}
