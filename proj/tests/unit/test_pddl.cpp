#include <doctest.h>

#include "helpers.hpp"
#include "relevance/generators.hpp"
#include "relevance/pddl.hpp"
#include "relevance/planner.hpp"
#include "relevance/search.hpp"

using namespace relevance;

namespace {

std::set<std::pair<std::string, std::string>> typed(const PlanningProblem& p) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& o : p.objects) out.emplace(o.name, o.type);
  return out;
}

}  // namespace

TEST_SUITE("pddl") {
  TEST_CASE("export then import reproduces the problem") {
    for (auto d : {DomainKind::Coffee, DomainKind::Cereal}) {
      const auto p = compile(generate(d, Difficulty::Simple, 5));
      const auto text = export_pddl(p);
      CHECK(text.domain.find("(:requirements :strips :typing)") != std::string::npos);
      const auto q = import_pddl(text.domain, text.problem);
      CHECK(q.domain == p.domain);
      CHECK(typed(q) == typed(p));
      CHECK(q.init == p.init);
      CHECK(std::set<Atom>(q.goal.begin(), q.goal.end()) == std::set<Atom>(p.goal.begin(), p.goal.end()));
      const auto again = export_pddl(q);
      CHECK(again.domain == text.domain);
      const auto r = solve(q, 30.0);
      REQUIRE(r.status == SolveStatus::Solved);
      CHECK(validate(p, *r.plan).accepted);
    }
  }

  TEST_CASE("reader tolerates case and comments") {
    const auto text = export_pddl(compile(coffee_reference_instance()));
    std::string shouted = "; exported\n" + text.problem;
    for (auto& c : shouted) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    CHECK_NOTHROW(import_pddl(text.domain, shouted));
  }

  TEST_CASE("malformed input is a parse error") {
    const auto text = export_pddl(compile(coffee_reference_instance()));
    CHECK_ERROR_KIND(import_pddl(text.domain, "(define (problem x"), ErrorKind::ParseError);
    CHECK_ERROR_KIND(import_pddl("(define (domain d) (:action a :parameters (?x - nothing)))", text.problem),
                     ErrorKind::ParseError);
    CHECK_ERROR_KIND(import_pddl(text.domain, "(foo)"), ErrorKind::ParseError);
  }
}
