#include <atomic>
#include <thread>

#include <doctest.h>
#include <httplib.h>

#include "helpers.hpp"
#include "relevance/external_provider.hpp"
#include "relevance/generators.hpp"
#include "relevance/relevance.hpp"

using namespace relevance;
using nlohmann::json;

namespace {

std::string envelope(const std::string& content) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

// Local stand-in for a chat-completion endpoint that answers with `reply`.
struct FakeEndpoint {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> calls{0};
  std::string last_body;

  explicit FakeEndpoint(std::string reply) {
    server.Post("/v1/chat/completions", [this, reply](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      last_body = req.body;
      res.set_content(reply, "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeEndpoint() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"; }
};

}  // namespace

TEST_SUITE("external_provider") {
  TEST_CASE("prompt template is versioned and rendered") {
    CHECK(prompt_template_version() == "v1");
    const auto inst = coffee_reference_instance();
    const auto prompt = render_prompt(inst.scene, inst.objective, inst.tasks);
    CHECK(prompt.find(inst.objective.text) != std::string::npos);
    CHECK(prompt.find("plastic_cup_1") != std::string::npos);
    CHECK(prompt.find("cold_brew") != std::string::npos);
    CHECK(prompt.find("{{") == std::string::npos);
  }

  TEST_CASE("completion parsing") {
    const auto table = coffee_reference_instance().oracle_table;
    const auto plain = parse_completion_response(envelope(table_to_json(table).dump()));
    CHECK(table_to_json(plain) == table_to_json(table));
    const auto fenced = parse_completion_response(envelope("Sure:\n```json\n" + table_to_json(table).dump() + "\n```"));
    CHECK(table_to_json(fenced) == table_to_json(table));
    CHECK_ERROR_KIND(parse_completion_response("not json"), ErrorKind::MalformedResponse);
    CHECK_ERROR_KIND(parse_completion_response(envelope("{\"class_given_task\": 5}")), ErrorKind::MalformedResponse);
    CHECK_ERROR_KIND(parse_completion_response(envelope(
                         R"({"class_given_task": [{"class_id": "a", "task_id": "b", "objective_id": "o", "p": 3}]})")),
                     ErrorKind::MalformedResponse);
  }

  TEST_CASE("scene hash is stable and content sensitive") {
    const auto a = coffee_reference_instance().scene;
    CHECK(scene_hash(a) == scene_hash(coffee_reference_instance().scene));
    CHECK(scene_hash(a) != scene_hash(generate(DomainKind::Coffee, Difficulty::Simple, 1).scene));
  }

  TEST_CASE("provider queries once per objective and matches the table provider") {
    const auto inst = coffee_reference_instance();
    FakeEndpoint endpoint(envelope(table_to_json(inst.oracle_table).dump()));
    auto scene = std::make_shared<const SceneRepresentation>(inst.scene);
    ExternalProvider external(scene, inst.tasks, {endpoint.url(), "secret", "m", 5});
    TableProvider table(scene, inst.oracle_table);

    CueSet cues;
    for (const auto& c : inst.cues) cues.add(c);
    const auto a = determine(inst.scene, inst.objective, inst.tasks, external, cues, {});
    const auto b = determine(inst.scene, inst.objective, inst.tasks, table, cues, {});
    CHECK(a.sufficient());
    CHECK(a.element_scores == b.element_scores);
    CHECK(external.network_calls() == 1);
    CHECK(endpoint.calls == 1);
    CHECK(json::parse(endpoint.last_body).at("model") == "m");
    CHECK_FALSE(external.last_error().has_value());

    external.clear_cache();
    (void)external.query(inst.objective);
    CHECK(external.network_calls() == 2);
  }

  TEST_CASE("unreachable endpoint degrades to insufficiency") {
    const auto inst = coffee_reference_instance();
    auto scene = std::make_shared<const SceneRepresentation>(inst.scene);
    // Port 9 on loopback is normally closed; the connect fails fast.
    ExternalProvider external(scene, inst.tasks, {"http://127.0.0.1:9/v1", "", "m", 1});
    CueSet cues{"task:cold_brew"};
    const auto r = determine(inst.scene, inst.objective, inst.tasks, external, cues, {});
    CHECK_FALSE(r.sufficient());
    CHECK(external.last_error().has_value());

    ExternalProvider malformed(scene, inst.tasks, {"ftp://nowhere", "", "m", 1});
    CHECK_FALSE(determine(inst.scene, inst.objective, inst.tasks, malformed, cues, {}).sufficient());
  }

  TEST_CASE("garbage replies degrade too") {
    const auto inst = coffee_reference_instance();
    FakeEndpoint endpoint(envelope("I cannot help with that."));
    auto scene = std::make_shared<const SceneRepresentation>(inst.scene);
    ExternalProvider external(scene, inst.tasks, {endpoint.url(), "", "m", 5});
    CueSet cues{"task:cold_brew"};
    CHECK_FALSE(determine(inst.scene, inst.objective, inst.tasks, external, cues, {}).sufficient());
    CHECK(external.last_error().has_value());
  }
}
