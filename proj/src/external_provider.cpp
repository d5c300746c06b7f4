#include "relevance/external_provider.hpp"

#include <cstdlib>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "prompt_template.inc"
#include "relevance/error.hpp"

namespace relevance {

using nlohmann::json;

std::optional<ExternalConfig> ExternalConfig::from_environment() {
  const char* url = std::getenv("RELEVANCE_LLM_URL");
  if (!url || !*url) return std::nullopt;
  ExternalConfig config;
  config.url = url;
  if (const char* key = std::getenv("RELEVANCE_LLM_KEY")) config.api_key = key;
  if (const char* model = std::getenv("RELEVANCE_LLM_MODEL"); model && *model) config.model = model;
  return config;
}

std::string_view prompt_template_version() { return kPromptTemplateVersion; }
std::string_view prompt_template() { return kPromptTemplate; }

namespace {

void replace_all(std::string& text, std::string_view token, const std::string& value) {
  for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size()))
    text.replace(pos, token.size(), value);
}

}  // namespace

std::string render_prompt(const SceneRepresentation& scene, const Objective& objective,
                          const std::vector<TaskSpec>& tasks) {
  std::ostringstream task_lines;
  for (const auto& t : tasks) task_lines << "- " << t.id << ": " << t.description << '\n';
  std::ostringstream class_lines;
  for (const auto& c : scene.classes()) {
    class_lines << "- class " << c.id << " (" << c.criterion << "):\n";
    for (const auto& id : c.member_ids) {
      const auto& e = scene.element(id);
      class_lines << "    " << e.id << ", " << e.name << ", " << e.type() << '\n';
    }
  }
  std::string prompt(prompt_template());
  replace_all(prompt, "{{objective_id}}", objective.id);
  replace_all(prompt, "{{objective_text}}", objective.text);
  replace_all(prompt, "{{tasks}}", task_lines.str());
  replace_all(prompt, "{{classes}}", class_lines.str());
  return prompt;
}

ProbabilityTable parse_completion_response(const std::string& body) {
  try {
    const json envelope = json::parse(body);
    std::string content = envelope.at("choices").at(0).at("message").at("content").get<std::string>();
    // Models sometimes wrap JSON in a fenced block.
    static const std::regex fenced(R"(```(?:json)?\s*([\s\S]*?)```)");
    if (std::smatch m; std::regex_search(content, m, fenced)) content = m[1].str();
    return table_from_json(json::parse(content));
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::MalformedResponse, ex.what());
  } catch (const Error& ex) {
    throw Error(ErrorKind::MalformedResponse, ex.what());
  }
}

std::uint64_t scene_hash(const SceneRepresentation& scene) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : scene_to_json(scene).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExternalProvider::ExternalProvider(std::shared_ptr<const SceneRepresentation> scene, std::vector<TaskSpec> tasks,
                                   ExternalConfig config)
    : ProbabilityProvider(std::move(scene)),
      tasks_(std::move(tasks)),
      config_(std::move(config)),
      scene_hash_(relevance::scene_hash(this->scene())) {}

std::string ExternalProvider::fetch(const std::string& prompt) const {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.url, m, url_re))
    throw Error(ErrorKind::EndpointUnreachable, "malformed endpoint URL '" + config_.url + "'");
  const std::string path = m[2].matched ? m[2].str() : "/";

  httplib::Client client(m[1].str());
  client.set_connection_timeout(config_.timeout_seconds);
  client.set_read_timeout(config_.timeout_seconds);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const json request = {
      {"model", config_.model},
      {"temperature", 0},
      {"response_format", {{"type", "json_object"}}},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  ++network_calls_;
  auto res = client.Post(path, headers, request.dump(), "application/json");
  if (!res) throw Error(ErrorKind::EndpointUnreachable, httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(ErrorKind::EndpointUnreachable, "HTTP status " + std::to_string(res->status));
  return res->body;
}

std::shared_ptr<const TableProvider> ExternalProvider::fragment_provider(const Objective& objective) const {
  std::lock_guard lock(mutex_);
  const auto key = std::make_pair(scene_hash_, objective.id);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  ProbabilityTable fragment;
  try {
    fragment = parse_completion_response(fetch(render_prompt(scene(), objective, tasks_)));
    last_error_.reset();
  } catch (const Error& ex) {
    last_error_ = ex.what();
    fragment = ProbabilityTable{};
  }
  fragment.objectives[objective.id] = objective;
  fragment.tasks = tasks_;
  auto provider = std::make_shared<const TableProvider>(
      std::make_shared<const SceneRepresentation>(scene()), std::move(fragment));
  // Degraded fragments are cached too; clear_cache() forces a retry.
  cache_.emplace(key, provider);
  return provider;
}

ProbabilityTable ExternalProvider::query(const Objective& objective) const {
  return fragment_provider(objective)->table();
}

void ExternalProvider::clear_cache() {
  std::lock_guard lock(mutex_);
  cache_.clear();
}

std::size_t ExternalProvider::network_calls() const {
  std::lock_guard lock(mutex_);
  return network_calls_;
}

std::optional<std::string> ExternalProvider::last_error() const {
  std::lock_guard lock(mutex_);
  return last_error_;
}

std::optional<TaskDistribution> ExternalProvider::task_distribution(const Objective& objective,
                                                                    const CueSet& cues) const {
  return fragment_provider(objective)->task_distribution(objective, cues);
}

ElementTerms ExternalProvider::element_terms(const Element& element, const Objective& objective) const {
  require_element(element);
  return fragment_provider(objective)->element_terms(element, objective);
}

std::optional<double> ExternalProvider::class_entry(const AttributeClass& cls, const TaskSpec& task,
                                                    const Objective& objective) const {
  return fragment_provider(objective)->class_given_task(cls, task, objective, {});
}

}  // namespace relevance
