#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "relevance/cli.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "relevance");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = relevance::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "relevance_unit_cli";
  std::filesystem::create_directories(dir);
  return dir;
}

std::size_t lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 1 with a synopsis") {
    const auto unknown = run({"sweep", "--bogus"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("error:") == 0);
    CHECK(unknown.err.find("--tau-c") != std::string::npos);

    CHECK(run({"relevance", "--tau-c", "1.5"}).code == 1);
    CHECK(run({"relevance", "--tau-e", "0.95"}).code == 1);  // above tau_necessary
    CHECK(run({"sweep", "--domain", "garden"}).code == 1);
    CHECK(run({"generate"}).code == 1);  // --out is required
    CHECK(run({}).code == 1);
  }

  TEST_CASE("help exits 0") {
    const auto top = run({"--help"});
    CHECK(top.code == 0);
    CHECK(top.out.find("plan-bench") != std::string::npos);
    const auto sub = run({"plan-bench", "--help"});
    CHECK(sub.code == 0);
    CHECK(sub.out.find("--deterministic-time") != std::string::npos);
  }

  TEST_CASE("runtime errors exit 2 and name the error kind") {
    const auto r = run({"relevance", "--scene", "/nonexistent/scene.json", "--table", "/nonexistent/table.json"});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error: ParseError: ", 0) == 0);
    CHECK(run({"relevance", "--objective", "no_such_objective"}).code == 2);
  }

  TEST_CASE("relevance prints a JSON result") {
    const auto r = run({"relevance", "--domain", "coffee", "--seed", "4"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["sufficient"] == true);
    CHECK_FALSE(doc["relevant_elements"].empty());
    CHECK(doc.contains("decision"));

    const auto none = run({"relevance", "--cue", "human_count=1"});
    REQUIRE(none.code == 0);
    CHECK(nlohmann::json::parse(none.out)["sufficient"] == false);
  }

  TEST_CASE("sweep writes one row per cell and case plus a summary") {
    const auto csv = scratch() / "sweep.csv";
    REQUIRE(run({"sweep", "--cases", "30", "--out", csv.string()}).code == 0);
    CHECK(lines(csv) == 751);
    std::ifstream in(scratch() / "sweep.summary.json");
    CHECK(nlohmann::json::parse(in)["cells"].size() == 25);
  }

  TEST_CASE("generate and reload a bundle through relevance") {
    const auto dir = scratch() / "bundles";
    std::filesystem::remove_all(dir);
    const auto g = run({"generate", "--domain", "cereal", "--cases", "2", "--seed", "3", "--out", dir.string()});
    REQUIRE(g.code == 0);
    std::istringstream listed(g.out);
    std::string first;
    std::getline(listed, first);
    REQUIRE(std::filesystem::is_directory(first));
    std::size_t n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) n += entry.is_directory();
    CHECK(n == 2);
  }

  TEST_CASE("run-scenario and export-pddl") {
    const auto log = run({"run-scenario"});
    REQUIRE(log.code == 0);
    CHECK(log.out.find("\"decision\"") != std::string::npos);
    CHECK(run({"run-scenario", "--mode", "concurrent"}).out == log.out);

    const auto pddl = run({"export-pddl", "--seed", "1"});
    REQUIRE(pddl.code == 0);
    CHECK(pddl.out.find("(define (domain") != std::string::npos);
    const auto dir = scratch() / "pddl";
    REQUIRE(run({"export-pddl", "--pruned", "--out", dir.string()}).code == 0);
    CHECK(std::filesystem::exists(dir / "domain.pddl"));
    CHECK(std::filesystem::exists(dir / "problem.pddl"));
  }
}
