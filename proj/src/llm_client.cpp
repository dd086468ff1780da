#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "a11y/llm_client.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "a11y/errors.hpp"
#include "a11y/text_util.hpp"
#include "a11y/ui_model.hpp"

namespace a11y {

namespace {

std::string response_text(const nlohmann::json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

std::map<std::string, std::vector<std::string>> section_map(const nlohmann::json& j, const char* key) {
  std::map<std::string, std::vector<std::string>> out;
  if (!j.contains(key)) return out;
  for (const auto& [name, v] : j.at(key).items()) {
    out[name] = v.is_string() ? std::vector<std::string>{v.get<std::string>()} : v.get<std::vector<std::string>>();
  }
  return out;
}

std::optional<AgentRole> role_field(const nlohmann::json& j) {
  if (!j.contains("role")) return std::nullopt;
  const auto name = j.at("role").get<std::string>();
  auto role = parse_agent_role(name);
  if (!role) throw LoadError(fmt::format("unknown agent role '{}'", name));
  return role;
}

}  // namespace

std::string_view to_string(AgentRole role) {
  switch (role) {
    case AgentRole::Planner: return "planner";
    case AgentRole::Action: return "action";
    case AgentRole::Evaluation: return "evaluation";
  }
  return "planner";
}

std::optional<AgentRole> parse_agent_role(std::string_view name) {
  if (name == "planner") return AgentRole::Planner;
  if (name == "action") return AgentRole::Action;
  if (name == "evaluation") return AgentRole::Evaluation;
  return std::nullopt;
}

ScriptedQueueClient::ScriptedQueueClient(std::vector<Entry> entries) : queue_(entries.begin(), entries.end()) {}

void ScriptedQueueClient::push(Entry entry) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(entry));
}

std::size_t ScriptedQueueClient::remaining() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

std::string ScriptedQueueClient::complete(const LLMRequest& request) {
  std::lock_guard lock(mu_);
  if (queue_.empty()) throw ClientError("script exhausted");
  Entry entry = std::move(queue_.front());
  queue_.pop_front();
  if (entry.role && *entry.role != request.role) {
    throw ClientError(fmt::format("script expected a {} request, got {}", to_string(*entry.role),
                                  to_string(request.role)));
  }
  if (entry.expected_prompt && *entry.expected_prompt != request.prompt) {
    throw ClientError(fmt::format("unexpected {} prompt (template {})", to_string(request.role),
                                  request.template_id));
  }
  return entry.response;
}

RuleTableClient::RuleTableClient(std::vector<Rule> rules) : rules_(std::move(rules)), used_(rules_.size(), 0) {}

void RuleTableClient::add(Rule rule) {
  std::lock_guard lock(mu_);
  rules_.push_back(std::move(rule));
  used_.push_back(0);
}

std::map<std::string, std::string> RuleTableClient::split_sections(std::string_view prompt) {
  std::map<std::string, std::string> sections;
  std::string* current = nullptr;
  for (const auto& line : text::split(prompt, '\n')) {
    if (line.starts_with("### ")) {
      current = &sections[text::trim(std::string_view(line).substr(4))];
      current->clear();
      continue;
    }
    if (current) {
      if (!current->empty()) current->push_back('\n');
      *current += line;
    }
  }
  return sections;
}

bool RuleTableClient::matches(const Rule& rule, const LLMRequest& request,
                              const std::map<std::string, std::string>& sections) const {
  if (rule.role && *rule.role != request.role) return false;
  for (const auto& s : rule.contains) {
    if (request.prompt.find(s) == std::string::npos) return false;
  }
  for (const auto& s : rule.not_contains) {
    if (request.prompt.find(s) != std::string::npos) return false;
  }
  auto section = [&](const std::string& name) -> std::string_view {
    auto it = sections.find(name);
    return it == sections.end() ? std::string_view{} : std::string_view(it->second);
  };
  for (const auto& [name, needles] : rule.section_contains) {
    const auto body = section(name);
    for (const auto& s : needles) {
      if (body.find(s) == std::string_view::npos) return false;
    }
  }
  for (const auto& [name, needles] : rule.section_not_contains) {
    const auto body = section(name);
    for (const auto& s : needles) {
      if (body.find(s) != std::string_view::npos) return false;
    }
  }
  return true;
}

std::string RuleTableClient::resolve_placeholders(std::string_view response, std::string_view prompt) {
  static const std::regex kPlaceholder(R"(\{\{(id|center_x|center_y):([^}]*)\}\})");
  const auto elements = parse_element_lines(prompt);
  std::string out;
  std::string subject(response);
  std::smatch m;
  auto begin = subject.cbegin();
  while (std::regex_search(begin, subject.cend(), m, kPlaceholder)) {
    out.append(begin, m[0].first);
    const std::string field = m[1];
    const std::string label = m[2];
    auto it = std::find_if(elements.begin(), elements.end(),
                           [&](const UIElement& e) { return e.text && *e.text == label; });
    if (it == elements.end()) {
      throw ClientError(fmt::format("placeholder '{}' names no element in the prompt", m[0].str()));
    }
    if (field == "id") out += std::to_string(it->id);
    else if (field == "center_x") out += std::to_string(it->box.center_x());
    else out += std::to_string(it->box.center_y());
    begin = m[0].second;
  }
  out.append(begin, subject.cend());
  return out;
}

std::string RuleTableClient::complete(const LLMRequest& request) {
  std::lock_guard lock(mu_);
  const auto sections = split_sections(request.prompt);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& rule = rules_[i];
    if (rule.times && used_[i] >= *rule.times) continue;
    if (!matches(rule, request, sections)) continue;
    ++used_[i];
    return resolve_placeholders(rule.response, request.prompt);
  }
  throw ClientError(fmt::format("no scripted rule matches the {} request (template {})", to_string(request.role),
                                request.template_id));
}

std::unique_ptr<LLMClient> scripted_client_from_json(const nlohmann::json& script) {
  try {
    const auto mode = script.value("mode", std::string("rules"));
    if (mode == "queue") {
      std::vector<ScriptedQueueClient::Entry> entries;
      for (const auto& e : script.at("responses")) {
        if (!e.is_object() || !e.contains("response")) {
          entries.push_back({std::nullopt, std::nullopt, response_text(e)});
          continue;
        }
        ScriptedQueueClient::Entry entry;
        entry.role = role_field(e);
        if (e.contains("expect")) entry.expected_prompt = e.at("expect").get<std::string>();
        entry.response = response_text(e.at("response"));
        entries.push_back(std::move(entry));
      }
      return std::make_unique<ScriptedQueueClient>(std::move(entries));
    }
    if (mode == "rules") {
      std::vector<RuleTableClient::Rule> rules;
      for (const auto& r : script.at("rules")) {
        RuleTableClient::Rule rule;
        rule.name = r.value("name", std::string{});
        rule.role = role_field(r);
        rule.contains = string_list(r, "contains");
        rule.not_contains = string_list(r, "not_contains");
        rule.section_contains = section_map(r, "section_contains");
        rule.section_not_contains = section_map(r, "section_not_contains");
        if (r.contains("times")) rule.times = r.at("times").get<int>();
        rule.response = response_text(r.at("response"));
        rules.push_back(std::move(rule));
      }
      return std::make_unique<RuleTableClient>(std::move(rules));
    }
    throw LoadError(fmt::format("unknown script mode '{}'", mode));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(fmt::format("invalid script: {}", e.what()));
  }
}

std::unique_ptr<LLMClient> load_scripted_client(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("cannot open script {}", path.string()));
  nlohmann::json script;
  try {
    script = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(fmt::format("{}: {}", path.string(), e.what()));
  }
  try {
    return scripted_client_from_json(script);
  } catch (const LoadError& e) {
    throw LoadError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

HttpChatClient::HttpChatClient(HttpChatConfig config) : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, kUrl)) {
    throw UsageError(fmt::format("invalid base URL '{}'", config_.base_url));
  }
  scheme_host_port_ = m[1];
  std::string prefix = m[2].matched ? m[2].str() : std::string{};
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  if (!prefix.ends_with("/v1")) prefix += "/v1";
  path_prefix_ = prefix;
  sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

nlohmann::json HttpChatClient::request_body(const LLMRequest& request) const {
  nlohmann::json body = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages",
       nlohmann::json::array({
           {{"role", "system"},
            {"content", fmt::format("You are the {} agent of a mobile accessibility test runner. "
                                    "Answer with a single JSON object.",
                                    to_string(request.role))}},
           {{"role", "user"}, {"content", request.prompt}},
       })},
  };
  if (config_.seed) body["seed"] = *config_.seed;
  return body;
}

std::string HttpChatClient::complete(const LLMRequest& request) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  httplib::Headers headers;
  if (const char* token = std::getenv(config_.api_key_env.c_str()); token && *token) {
    headers.emplace("Authorization", fmt::format("Bearer {}", token));
  }
  const auto body = request_body(request).dump();
  const auto path = path_prefix_ + "/chat/completions";

  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleep_(backoff);
      backoff *= 2;
    }
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = fmt::format("transport error: {}", httplib::to_string(res.error()));
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = fmt::format("HTTP {}", res->status);
      continue;
    }
    if (res->status != 200) {
      throw ClientError(fmt::format("HTTP {}: {}", res->status, res->body), false);
    }
    try {
      const auto reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ClientError(fmt::format("malformed completion response: {}", e.what()), false);
    }
  }
  throw ClientError(fmt::format("giving up after {} retries: {}", config_.max_retries, last_error), false);
}

}  // namespace a11y
