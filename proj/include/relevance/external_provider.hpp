#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "relevance/probability.hpp"

namespace relevance {

/// Endpoint settings for a chat-completion style text-generation service.
struct ExternalConfig {
  std::string url;  // e.g. http://localhost:8080/v1/chat/completions
  std::string api_key;
  std::string model = "default";
  int timeout_seconds = 60;

  /// Reads RELEVANCE_LLM_URL / RELEVANCE_LLM_KEY (and optional RELEVANCE_LLM_MODEL).
  static std::optional<ExternalConfig> from_environment();
};

/// Version tag and body of the prompt template shipped in assets/.
std::string_view prompt_template_version();
std::string_view prompt_template();

/// Renders the prompt for one scene and objective.
std::string render_prompt(const SceneRepresentation& scene, const Objective& objective,
                          const std::vector<TaskSpec>& tasks);

/// Extracts a table fragment from a chat-completion response body. Throws
/// MalformedResponse on structural problems or out-of-range probabilities.
ProbabilityTable parse_completion_response(const std::string& body);

/// Stable FNV-1a hash of the canonical scene document; used as cache key.
std::uint64_t scene_hash(const SceneRepresentation& scene);

/// Provider backed by an external service. Responses are cached per
/// (scene hash, objective id); failures degrade to unavailable entries so the
/// relevance mechanism takes its insufficiency path.
class ExternalProvider : public ProbabilityProvider {
 public:
  ExternalProvider(std::shared_ptr<const SceneRepresentation> scene, std::vector<TaskSpec> tasks,
                   ExternalConfig config);

  /// Fragment for `objective`; cached. Empty fragment on EndpointUnreachable or MalformedResponse.
  ProbabilityTable query(const Objective& objective) const;

  void clear_cache();
  std::size_t network_calls() const;
  std::optional<std::string> last_error() const;

  std::optional<TaskDistribution> task_distribution(const Objective& objective,
                                                    const CueSet& cues) const override;
  ElementTerms element_terms(const Element& element, const Objective& objective) const override;

 protected:
  std::optional<double> class_entry(const AttributeClass& cls, const TaskSpec& task,
                                    const Objective& objective) const override;

 private:
  std::string fetch(const std::string& prompt) const;
  std::shared_ptr<const TableProvider> fragment_provider(const Objective& objective) const;

  std::vector<TaskSpec> tasks_;
  ExternalConfig config_;
  std::uint64_t scene_hash_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::uint64_t, std::string>, std::shared_ptr<const TableProvider>> cache_;
  mutable std::size_t network_calls_ = 0;
  mutable std::optional<std::string> last_error_;
};

}  // namespace relevance
