#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace a11y {

enum class AgentRole { Planner, Action, Evaluation };

std::string_view to_string(AgentRole role);
std::optional<AgentRole> parse_agent_role(std::string_view name);

struct LLMRequest {
  AgentRole role = AgentRole::Planner;
  std::string template_id;
  std::string prompt;
};

/// Text completion backend. Implementations throw ClientError on failure.
class LLMClient {
 public:
  virtual ~LLMClient() = default;
  virtual std::string complete(const LLMRequest& request) = 0;
};

/// FIFO of canned responses. When an entry carries `expected_prompt` the
/// request must match it exactly.
class ScriptedQueueClient : public LLMClient {
 public:
  struct Entry {
    std::optional<AgentRole> role;
    std::optional<std::string> expected_prompt;
    std::string response;
  };

  ScriptedQueueClient() = default;
  explicit ScriptedQueueClient(std::vector<Entry> entries);

  void push(Entry entry);
  void push(std::string response) { push(Entry{std::nullopt, std::nullopt, std::move(response)}); }
  std::size_t remaining() const;

  std::string complete(const LLMRequest& request) override;

 private:
  mutable std::mutex mu_;
  std::deque<Entry> queue_;
};

/// Ordered rule table: the first rule whose conditions hold answers the
/// request. Prompts are split into sections at lines starting with "### ";
/// `section_contains` restricts a substring test to one section.
///
/// Responses may use placeholders resolved against element lines found in
/// the prompt: {{id:TEXT}}, {{center_x:TEXT}}, {{center_y:TEXT}} pick the
/// first element whose text is TEXT.
class RuleTableClient : public LLMClient {
 public:
  struct Rule {
    std::string name;
    std::optional<AgentRole> role;
    std::vector<std::string> contains;
    std::vector<std::string> not_contains;
    std::map<std::string, std::vector<std::string>> section_contains;
    std::map<std::string, std::vector<std::string>> section_not_contains;
    std::optional<int> times;  // uses before the rule retires
    std::string response;
  };

  RuleTableClient() = default;
  explicit RuleTableClient(std::vector<Rule> rules);

  void add(Rule rule);
  std::string complete(const LLMRequest& request) override;

  /// Section name -> body, for prompts using "### <name>" headers.
  static std::map<std::string, std::string> split_sections(std::string_view prompt);
  static std::string resolve_placeholders(std::string_view response, std::string_view prompt);

 private:
  bool matches(const Rule& rule, const LLMRequest& request,
               const std::map<std::string, std::string>& sections) const;

  mutable std::mutex mu_;
  std::vector<Rule> rules_;
  std::vector<int> used_;
};

/// Loads a script file: {"mode": "queue", "responses": [...]} or
/// {"mode": "rules", "rules": [...]}. Responses may be strings or JSON
/// values (serialized compactly).
std::unique_ptr<LLMClient> load_scripted_client(const std::filesystem::path& path);
std::unique_ptr<LLMClient> scripted_client_from_json(const nlohmann::json& script);

struct HttpChatConfig {
  std::string base_url = "http://127.0.0.1:8080";
  std::string model = "gpt-4";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  std::optional<long long> seed;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{120};
};

/// OpenAI-compatible chat-completions client. Transport errors, 429 and 5xx
/// are retried with exponential backoff; safe to share across threads.
class HttpChatClient : public LLMClient {
 public:
  explicit HttpChatClient(HttpChatConfig config);

  std::string complete(const LLMRequest& request) override;

  /// Request body for one completion, exposed for tests.
  nlohmann::json request_body(const LLMRequest& request) const;

  using Sleeper = std::function<void(std::chrono::milliseconds)>;
  void set_sleeper(Sleeper sleeper) { sleep_ = std::move(sleeper); }

 private:
  HttpChatConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  Sleeper sleep_;
};

}  // namespace a11y
