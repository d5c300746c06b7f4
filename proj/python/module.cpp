// Python bindings. Structured results cross the boundary as JSON text; the
// package __init__ turns them into dicts and lists.

#include <memory>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relevance/error.hpp"
#include "relevance/events.hpp"
#include "relevance/generators.hpp"
#include "relevance/metrics.hpp"
#include "relevance/pddl.hpp"
#include "relevance/planner.hpp"
#include "relevance/relevance.hpp"

namespace py = pybind11;
using namespace relevance;
using nlohmann::json;

namespace {

Thresholds thresholds(double tau_c, double tau_e, double tau_necessary, double h_max_fraction) {
  Thresholds th{tau_c, tau_e, tau_necessary, h_max_fraction};
  th.validate();
  return th;
}

std::string determine_json(const std::string& scene_text, const std::string& table_text, const std::string& objective,
                           const std::vector<std::string>& cue_keys, double tau_c, double tau_e,
                           double tau_necessary, double h_max_fraction) {
  const auto scene = std::make_shared<const SceneRepresentation>(scene_from_json(json::parse(scene_text)));
  const auto table = table_from_json(json::parse(table_text));
  if (table.objectives.empty()) throw Error(ErrorKind::UnknownObjective, "table declares no objective");
  auto it = objective.empty() ? table.objectives.begin() : table.objectives.find(objective);
  if (it == table.objectives.end()) throw Error(ErrorKind::UnknownObjective, "unknown objective " + objective);
  CueSet cues;
  for (const auto& c : cue_keys) cues.add(c);
  const TableProvider provider(scene, table);
  const auto th = thresholds(tau_c, tau_e, tau_necessary, h_max_fraction);
  const auto result = determine(*scene, it->second, table.tasks, provider, cues, th);
  auto doc = result_to_json(result);
  if (result.sufficient()) {
    const auto part = necessity_partition(result, th);
    doc["necessary"] = part.necessary;
    doc["optional"] = part.optional;
  }
  return doc.dump();
}

std::string instance_json(const std::string& domain, const std::string& difficulty, std::uint64_t seed) {
  const auto inst = generate(parse_domain(domain), parse_difficulty(difficulty), seed);
  auto doc = instance_to_json(inst);
  doc["scene"] = scene_to_json(inst.scene);
  doc["table"] = table_to_json(inst.oracle_table);
  return doc.dump();
}

std::string sweep_json(const std::string& domain, const std::string& difficulty, std::size_t cases,
                       std::uint64_t seed, const std::string& provider) {
  SweepConfig cfg;
  cfg.domain = parse_domain(domain);
  cfg.difficulty = parse_difficulty(difficulty);
  cfg.cases = cases;
  cfg.seed = seed;
  cfg.provider = parse_provider(provider);
  return sweep_summary_json(cfg, sweep(cfg)).dump();
}

std::string plan_bench_json(const std::string& domain, const std::string& difficulty, std::size_t cases,
                            std::uint64_t seed, double timeout, const std::vector<std::string>& methods,
                            bool deterministic_time) {
  BenchConfig cfg;
  cfg.domain = parse_domain(domain);
  cfg.difficulty = parse_difficulty(difficulty);
  cfg.cases = cases;
  cfg.seed = seed;
  cfg.timeout_seconds = timeout;
  cfg.deterministic_time = deterministic_time;
  cfg.methods.clear();
  for (const auto& m : methods) cfg.methods.push_back(parse_method(m));
  py::gil_scoped_release release;
  return bench_summary_json(cfg, planning_benchmark(cfg)).dump();
}

std::string inquiry_bench_json(const std::string& domain, const std::string& difficulty, std::size_t cases,
                               std::uint64_t seed) {
  return inquiry_json(inquiry_benchmark(parse_domain(domain), parse_difficulty(difficulty), cases, seed, {})).dump();
}

std::string run_demo_jsonl(bool concurrent) {
  const auto inst = coffee_reference_instance();
  auto scene = std::make_shared<const SceneRepresentation>(inst.scene);
  const TableProvider provider(scene, inst.oracle_table);
  const PipelineConfig cfg{*scene, provider, inst.tasks, inst.oracle_table.objectives, {},
                           coffee_demo_preferences("alice")};
  PipelineOptions options;
  options.mode = concurrent ? PipelineMode::Concurrent : PipelineMode::Synchronous;
  py::gil_scoped_release release;
  return run_pipeline(coffee_demo_scenario(), cfg, options).to_jsonl();
}

py::tuple export_pddl_text(const std::string& domain, const std::string& difficulty, std::uint64_t seed) {
  const auto text = export_pddl(compile(generate(parse_domain(domain), parse_difficulty(difficulty), seed)));
  return py::make_tuple(text.domain, text.problem);
}

py::dict scores(const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
  const auto s = score_prediction(IdSet(predicted.begin(), predicted.end()), IdSet(truth.begin(), truth.end()));
  py::dict d;
  d["precision"] = s.precision;
  d["recall"] = s.recall;
  d["f1"] = s.f1;
  d["object_ratio"] = s.object_ratio;
  return d;
}

}  // namespace

PYBIND11_MODULE(_relevance, m) {
  m.doc() = "Relevance determination engine and benchmark harness";

  static py::exception<Error> relevance_error(m, "RelevanceError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(relevance_error.ptr(), e.what());
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("generate_json", &instance_json, py::arg("domain"), py::arg("difficulty"), py::arg("seed"));
  m.def("determine_json", &determine_json, py::arg("scene"), py::arg("table"), py::arg("objective") = "",
        py::arg("cues") = std::vector<std::string>{}, py::arg("tau_c") = 0.2, py::arg("tau_e") = 0.2,
        py::arg("tau_necessary") = 0.9, py::arg("h_max_fraction") = 0.5);
  m.def("sweep_json", &sweep_json, py::arg("domain") = "coffee", py::arg("difficulty") = "simple",
        py::arg("cases") = 30, py::arg("seed") = 0, py::arg("provider") = "table");
  m.def("plan_bench_json", &plan_bench_json, py::arg("domain") = "coffee", py::arg("difficulty") = "simple",
        py::arg("cases") = 30, py::arg("seed") = 0, py::arg("timeout") = 120.0,
        py::arg("methods") = std::vector<std::string>{"relevance", "pure_planning", "random_relevance"},
        py::arg("deterministic_time") = false);
  m.def("inquiry_bench_json", &inquiry_bench_json, py::arg("domain") = "coffee", py::arg("difficulty") = "simple",
        py::arg("cases") = 30, py::arg("seed") = 0);
  m.def("run_demo_jsonl", &run_demo_jsonl, py::arg("concurrent") = false);
  m.def("export_pddl", &export_pddl_text, py::arg("domain"), py::arg("difficulty"), py::arg("seed"));
  m.def("score_prediction", &scores, py::arg("predicted"), py::arg("truth"));
}
