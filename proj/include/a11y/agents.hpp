#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "a11y/device.hpp"
#include "a11y/llm_client.hpp"

namespace a11y {

enum class StepStatus { Todo, Success };

struct PlanStep {
  std::string thought;
  std::string evaluation;
  std::string action;
  StepStatus status = StepStatus::Todo;
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::string goal;
  std::vector<PlanStep> steps;
  int revision = 0;
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct TapAction {
  int id = 0;
  friend bool operator==(const TapAction&, const TapAction&) = default;
};
struct SwipeAction {
  SwipeDirection direction = SwipeDirection::Up;
  int x = -1;  // negative: screen center
  int y = -1;
  friend bool operator==(const SwipeAction&, const SwipeAction&) = default;
};
struct TextEntryAction {
  int id = 0;
  std::string text;
  friend bool operator==(const TextEntryAction&, const TextEntryAction&) = default;
};
struct StopAction {
  std::string feedback;
  friend bool operator==(const StopAction&, const StopAction&) = default;
};

using AgentAction = std::variant<TapAction, SwipeAction, TextEntryAction, StopAction>;

struct ActionCommand {
  std::string thought;
  std::vector<int> relevant_ui_ids;
  AgentAction action;
  friend bool operator==(const ActionCommand&, const ActionCommand&) = default;
};

enum class EvalResult { Success, Failure, TaskComplete };

struct EvaluationResult {
  std::string evaluation_criteria;
  EvalResult result = EvalResult::Failure;
  std::string explanation;
  friend bool operator==(const EvaluationResult&, const EvaluationResult&) = default;
};

struct LLMExchange {
  std::string prompt;
  std::string response;
  AgentRole agent_role = AgentRole::Planner;
  std::string template_id;
  int turn_index = 0;
  friend bool operator==(const LLMExchange&, const LLMExchange&) = default;
};

/// Fields the instruction parser could not recover by rules.
struct InstructionGuess {
  std::string app_name;
  std::string feature;
  std::string goal;
};

std::string_view to_string(StepStatus status);
std::string_view to_string(EvalResult result);
std::string_view action_name(const AgentAction& action);

nlohmann::json to_json(const Plan& plan);
nlohmann::json to_json(const ActionCommand& command);
nlohmann::json to_json(const EvaluationResult& result);
nlohmann::json to_json(const LLMExchange& exchange);
LLMExchange exchange_from_json(const nlohmann::json& j);

/// First balanced top-level {...} object, searching fenced code blocks
/// before the whole text. String literals are skipped when balancing.
/// Throws ParseError when none exists.
std::string extract_structured_block(std::string_view response);

// Strict parsers over a model response. Throw ParseError.
std::vector<PlanStep> parse_plan_steps(std::string_view response);
ActionCommand parse_action_command(std::string_view response);
EvaluationResult parse_evaluation(std::string_view response);

// Versioned prompt templates.
inline constexpr std::string_view kPlannerTemplate = "planner.v1";
inline constexpr std::string_view kReplannerTemplate = "replanner.v1";
inline constexpr std::string_view kActionTemplate = "action.v1";
inline constexpr std::string_view kEvaluationTemplate = "evaluation.v1";
inline constexpr std::string_view kInstructionTemplate = "instruction_extract.v1";

std::string planner_prompt(std::string_view goal, std::string_view app_name, std::string_view screen_text,
                           const std::vector<std::string>& instruction_steps = {});
std::string replanner_prompt(const Plan& previous, std::size_t step_index, std::string_view feedback,
                             std::string_view screen_text);
std::string action_prompt(const PlanStep& step, std::string_view screen_text);
std::string evaluation_prompt(std::string_view goal, const Plan& plan, std::size_t step_index,
                              const ActionCommand& command, std::string_view before_text,
                              std::string_view after_text);
std::string instruction_prompt(std::string_view raw_instructions, const std::vector<std::string>& features);

inline constexpr int kMaxReprompts = 2;

/// The planner, action and evaluation agents over one client, with the
/// session's exchange audit log. One instance per test session.
class AgentSession {
 public:
  explicit AgentSession(LLMClient& client) : client_(client) {}

  Plan propose_plan(std::string_view goal, std::string_view app_name, std::string_view screen_text,
                    const std::vector<std::string>& instruction_steps = {});
  Plan replan(const Plan& previous, std::size_t step_index, std::string_view feedback,
              std::string_view screen_text);
  /// Ids not present in `screen_text` turn the command into a Stop.
  ActionCommand next_action(const PlanStep& step, std::string_view screen_text);
  /// Unparseable responses become a failure explained as "evaluator unparseable".
  EvaluationResult evaluate_action(std::string_view goal, const Plan& plan, std::size_t step_index,
                                   const ActionCommand& command, std::string_view before_text,
                                   std::string_view after_text);
  InstructionGuess extract_instructions(std::string_view raw, const std::vector<std::string>& features);

  const std::vector<LLMExchange>& exchanges() const { return exchanges_; }

 private:
  std::string call(AgentRole role, std::string_view template_id, std::string prompt);

  template <typename T, typename Parse>
  T call_parsed(AgentRole role, std::string_view template_id, const std::string& prompt, Parse parse);

  LLMClient& client_;
  std::vector<LLMExchange> exchanges_;
};

}  // namespace a11y
