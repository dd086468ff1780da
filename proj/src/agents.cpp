#include "a11y/agents.hpp"

#include <set>

#include <fmt/format.h>

#include "a11y/errors.hpp"
#include "a11y/text_util.hpp"
#include "a11y/ui_model.hpp"

namespace a11y {

namespace {

constexpr std::string_view kPlanGuidelines =
    "- Produce a tentative plan of small steps that reaches the goal from the current screen.\n"
    "- Each step's action is one brief, concrete input on one screen: tap an element, swipe or scroll "
    "in a direction, or enter text into a field.\n"
    "- If the app shows an unexpected state (a dialog, an unfamiliar screen), plan to navigate back "
    "through the app and recover before continuing.\n"
    "- An imperfect plan is acceptable; it will be revised while the test runs.\n"
    "- When the test needs a search query or other text the instructions do not give, make up a "
    "reasonable one from the app name and what the screen shows.";

constexpr std::string_view kPlanFormat =
    "Reply with one JSON object:\n"
    "{\"steps\": [{\"thought\": \"how this step helps reach the goal\", \"evaluation\": \"how to tell the "
    "step worked\", \"action\": \"the input to perform\", \"status\": \"todo\"}]}";

constexpr std::string_view kScreenLegend =
    "Screens are listed one element per line: (id) [Kind (Clickable)] \"text\" (x0, y0) to (x1, y1). "
    "[Back] marks a back button; a line [Keyboard visible] means an on-screen keyboard is showing.";

std::string string_field(const nlohmann::json& j, const char* key, bool required) {
  if (!j.contains(key) || j.at(key).is_null()) {
    if (required) throw ParseError(fmt::format("missing \"{}\"", key));
    return {};
  }
  const auto& v = j.at(key);
  if (!v.is_string()) throw ParseError(fmt::format("\"{}\" must be a string", key));
  return v.get<std::string>();
}

int int_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(fmt::format("missing \"{}\"", key));
  const auto& v = j.at(key);
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    const auto s = text::trim(v.get<std::string>());
    try {
      std::size_t used = 0;
      const int value = std::stoi(s, &used);
      if (used == s.size()) return value;
    } catch (const std::exception&) {
    }
  }
  throw ParseError(fmt::format("\"{}\" must be an integer", key));
}

nlohmann::json parse_object(std::string_view response) {
  const auto block = extract_structured_block(response);
  try {
    auto j = nlohmann::json::parse(block);
    if (!j.is_object()) throw ParseError("expected a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("invalid JSON: {}", e.what()));
  }
}

std::optional<std::size_t> balanced_object_at(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::nullopt;
}

std::optional<std::string> first_balanced_object(std::string_view s) {
  for (auto open = s.find('{'); open != std::string_view::npos; open = s.find('{', open + 1)) {
    if (auto end = balanced_object_at(s, open)) return std::string(s.substr(open, *end - open));
  }
  return std::nullopt;
}

std::string numbered(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += fmt::format("{}. {}", i + 1, lines[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(StepStatus status) { return status == StepStatus::Success ? "success" : "todo"; }

std::string_view to_string(EvalResult result) {
  switch (result) {
    case EvalResult::Success: return "success";
    case EvalResult::Failure: return "failure";
    case EvalResult::TaskComplete: return "task_complete";
  }
  return "failure";
}

std::string_view action_name(const AgentAction& action) {
  return std::visit(
      [](const auto& a) -> std::string_view {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, TapAction>) return "Tap";
        else if constexpr (std::is_same_v<T, SwipeAction>) return "Swipe";
        else if constexpr (std::is_same_v<T, TextEntryAction>) return "TextEntry";
        else return "Stop";
      },
      action);
}

nlohmann::json to_json(const Plan& plan) {
  auto steps = nlohmann::json::array();
  for (const auto& s : plan.steps) {
    steps.push_back({{"thought", s.thought},
                     {"evaluation", s.evaluation},
                     {"action", s.action},
                     {"status", std::string(to_string(s.status))}});
  }
  return {{"goal", plan.goal}, {"revision", plan.revision}, {"steps", steps}};
}

nlohmann::json to_json(const ActionCommand& command) {
  nlohmann::json action = {{"name", std::string(action_name(command.action))}};
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, TapAction>) {
          action["id"] = a.id;
        } else if constexpr (std::is_same_v<T, SwipeAction>) {
          action["direction"] = std::string(to_string(a.direction));
          action["x"] = a.x;
          action["y"] = a.y;
        } else if constexpr (std::is_same_v<T, TextEntryAction>) {
          action["id"] = a.id;
          action["text"] = a.text;
        } else {
          action["feedback"] = a.feedback;
        }
      },
      command.action);
  return {{"thought", command.thought}, {"relevant_ui_ids", command.relevant_ui_ids}, {"action", action}};
}

nlohmann::json to_json(const EvaluationResult& result) {
  return {{"evaluation_criteria", result.evaluation_criteria},
          {"result", std::string(to_string(result.result))},
          {"explanation", result.explanation}};
}

nlohmann::json to_json(const LLMExchange& exchange) {
  return {{"turn_index", exchange.turn_index},
          {"agent_role", std::string(to_string(exchange.agent_role))},
          {"template_id", exchange.template_id},
          {"prompt", exchange.prompt},
          {"response", exchange.response}};
}

LLMExchange exchange_from_json(const nlohmann::json& j) {
  LLMExchange e;
  e.turn_index = j.at("turn_index").get<int>();
  auto role = parse_agent_role(j.at("agent_role").get<std::string>());
  if (!role) throw ParseError("unknown agent role in exchange");
  e.agent_role = *role;
  e.template_id = j.at("template_id").get<std::string>();
  e.prompt = j.at("prompt").get<std::string>();
  e.response = j.at("response").get<std::string>();
  return e;
}

std::string extract_structured_block(std::string_view response) {
  std::size_t pos = 0;
  while (true) {
    const auto fence = response.find("```", pos);
    if (fence == std::string_view::npos) break;
    const auto body_start = response.find('\n', fence + 3);
    if (body_start == std::string_view::npos) break;
    const auto close = response.find("```", body_start + 1);
    const auto body = response.substr(body_start + 1, close == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : close - body_start - 1);
    if (auto obj = first_balanced_object(body)) return *obj;
    if (close == std::string_view::npos) break;
    pos = close + 3;
  }
  if (auto obj = first_balanced_object(response)) return *obj;
  throw ParseError("no JSON object found in response");
}

std::vector<PlanStep> parse_plan_steps(std::string_view response) {
  const auto j = parse_object(response);
  if (!j.contains("steps") || !j.at("steps").is_array()) throw ParseError("missing \"steps\" array");
  std::vector<PlanStep> steps;
  for (const auto& s : j.at("steps")) {
    if (!s.is_object()) throw ParseError("each step must be an object");
    PlanStep step;
    step.thought = string_field(s, "thought", false);
    step.evaluation = string_field(s, "evaluation", false);
    step.action = string_field(s, "action", true);
    if (text::trim(step.action).empty()) throw ParseError("step action is empty");
    steps.push_back(std::move(step));
  }
  if (steps.empty()) throw ParseError("plan has no steps");
  return steps;
}

ActionCommand parse_action_command(std::string_view response) {
  const auto j = parse_object(response);
  ActionCommand cmd;
  cmd.thought = string_field(j, "thought", false);
  if (j.contains("relevant_ui_ids") && j.at("relevant_ui_ids").is_array()) {
    for (const auto& id : j.at("relevant_ui_ids")) {
      if (id.is_number_integer()) cmd.relevant_ui_ids.push_back(id.get<int>());
    }
  }
  if (!j.contains("action") || !j.at("action").is_object()) throw ParseError("missing \"action\" object");
  const auto& a = j.at("action");
  const auto name = text::to_lower_ascii(string_field(a, "name", true));
  if (name == "tap") {
    cmd.action = TapAction{int_field(a, "id")};
  } else if (name == "swipe") {
    auto dir = parse_swipe_direction(string_field(a, "direction", true));
    if (!dir) throw ParseError("unknown swipe direction");
    SwipeAction swipe{*dir, -1, -1};
    if (a.contains("x")) swipe.x = int_field(a, "x");
    if (a.contains("y")) swipe.y = int_field(a, "y");
    cmd.action = swipe;
  } else if (name == "textentry") {
    cmd.action = TextEntryAction{int_field(a, "id"), string_field(a, "text", true)};
  } else if (name == "stop") {
    auto feedback = text::trim(string_field(a, "feedback", false));
    if (feedback.empty()) feedback = "stopped without feedback";
    cmd.action = StopAction{std::move(feedback)};
  } else {
    throw ParseError(fmt::format("unknown action \"{}\"", name));
  }
  return cmd;
}

EvaluationResult parse_evaluation(std::string_view response) {
  const auto j = parse_object(response);
  EvaluationResult r;
  r.evaluation_criteria = string_field(j, "evaluation_criteria", false);
  const auto result = text::to_lower_ascii(text::trim(string_field(j, "result", true)));
  if (result == "success") r.result = EvalResult::Success;
  else if (result == "failure") r.result = EvalResult::Failure;
  else if (result == "task_complete" || result == "task complete") r.result = EvalResult::TaskComplete;
  else throw ParseError(fmt::format("unknown result \"{}\"", result));
  r.explanation = string_field(j, "explanation", false);
  if (r.result == EvalResult::Failure && text::trim(r.explanation).empty()) {
    r.explanation = "evaluation failed without an explanation";
  }
  return r;
}

std::string planner_prompt(std::string_view goal, std::string_view app_name, std::string_view screen_text,
                           const std::vector<std::string>& instruction_steps) {
  return fmt::format(
      "You plan UI navigation for an accessibility test of the mobile app \"{}\".\n"
      "{}\n\n"
      "### Goal\n{}\n\n"
      "### Test steps\n{}\n\n"
      "### Guidelines\n{}\n\n"
      "### Output format\n{}\n\n"
      "### Current screen\n{}",
      app_name, kScreenLegend, goal, instruction_steps.empty() ? "none given" : numbered(instruction_steps),
      kPlanGuidelines, kPlanFormat, screen_text);
}

std::string replanner_prompt(const Plan& previous, std::size_t step_index, std::string_view feedback,
                             std::string_view screen_text) {
  const auto& step = previous.steps.at(step_index);
  return fmt::format(
      "You revise the navigation plan of an accessibility test after a step went wrong.\n"
      "{}\n\n"
      "### Goal\n{}\n\n"
      "### Previous plan\n{}\n\n"
      "### Current step\nStep {}: {}\n\n"
      "### Problem\n{}\n\n"
      "### Guidelines\n{}\n"
      "- Return only the steps from the current step onward; completed steps stay as they are.\n\n"
      "### Output format\n{}\n\n"
      "### Current screen\n{}",
      kScreenLegend, previous.goal, to_json(previous).dump(2), step_index + 1, step.action, feedback,
      kPlanGuidelines, kPlanFormat, screen_text);
}

std::string action_prompt(const PlanStep& step, std::string_view screen_text) {
  return fmt::format(
      "You turn one plan step into a single concrete action on the current screen.\n"
      "{}\n\n"
      "### Step\n{}\n\n"
      "### Step context\nThought: {}\nSuccess looks like: {}\n\n"
      "### Available actions\n"
      "- Tap: {{\"name\": \"Tap\", \"id\": <element id>}}. Tapping an element that is not marked clickable "
      "is acceptable when it is the only reasonable option on the screen.\n"
      "- Swipe: {{\"name\": \"Swipe\", \"direction\": \"up|down|left|right\", \"x\": <x>, \"y\": <y>}}. "
      "Swipe from a point to scroll and reveal more of the screen when needed.\n"
      "- TextEntry: {{\"name\": \"TextEntry\", \"id\": <element id>, \"text\": \"<text>\"}}. Taps the "
      "field, then types. If the step gives no text, come up with appropriate text yourself.\n"
      "- Stop: {{\"name\": \"Stop\", \"feedback\": \"<what an updated plan needs>\"}}. Use when the step "
      "cannot be done on this screen; the feedback must say what information the new plan needs.\n\n"
      "### Output format\n"
      "{{\"thought\": \"...\", \"relevant_ui_ids\": [<ids>], \"action\": {{...}}}}\n\n"
      "### Current screen\n{}",
      kScreenLegend, step.action, step.thought, step.evaluation, screen_text);
}

std::string evaluation_prompt(std::string_view goal, const Plan& plan, std::size_t step_index,
                              const ActionCommand& command, std::string_view before_text,
                              std::string_view after_text) {
  const auto& step = plan.steps.at(step_index);
  return fmt::format(
      "You judge whether the last action moved an accessibility test forward.\n"
      "{}\n\n"
      "### Goal\n{}\n\n"
      "### Plan\n{}\n\n"
      "### Current step\nStep {}: {}\nSuccess looks like: {}\n\n"
      "### Action taken\n{}\n\n"
      "### Hints\n"
      "- If the UI elements changed substantially, the action probably succeeded.\n"
      "- If the screen changed but no new view opened, lean toward success.\n"
      "- If the last action was a scroll or swipe and the screen did not change, the action probably "
      "failed.\n"
      "- If the element the step needs is not visible, more scrolling may be required.\n"
      "- If the last action tapped a text field, judge it by whether a keyboard is visible.\n\n"
      "### Output format\n"
      "{{\"evaluation_criteria\": \"...\", \"result\": \"success|failure|task_complete\", "
      "\"explanation\": \"...\"}}\n"
      "Use task_complete once the whole goal has been reached.\n\n"
      "### Screen before the action\n{}\n\n"
      "### Screen after the action\n{}",
      kScreenLegend, goal, to_json(plan).dump(2), step_index + 1, step.action, step.evaluation,
      to_json(command).dump(), before_text, after_text);
}

std::string instruction_prompt(std::string_view raw_instructions, const std::vector<std::string>& features) {
  return fmt::format(
      "Read the accessibility test instructions below and identify the app under test, the accessibility "
      "feature being tested and the goal of the test.\n\n"
      "### Supported features\n{}\n\n"
      "### Output format\n"
      "{{\"app_name\": \"...\", \"feature\": \"one of the supported features\", \"goal\": \"...\"}}\n\n"
      "### Instructions\n{}",
      fmt::join(features, ", "), raw_instructions);
}

std::string AgentSession::call(AgentRole role, std::string_view template_id, std::string prompt) {
  LLMRequest request{role, std::string(template_id), std::move(prompt)};
  auto response = client_.complete(request);
  exchanges_.push_back({request.prompt, response, role, request.template_id, static_cast<int>(exchanges_.size())});
  return response;
}

template <typename T, typename Parse>
T AgentSession::call_parsed(AgentRole role, std::string_view template_id, const std::string& prompt, Parse parse) {
  std::string attempt_prompt = prompt;
  for (int attempt = 0;; ++attempt) {
    const auto response = call(role, template_id, attempt_prompt);
    try {
      return parse(response);
    } catch (const ParseError& e) {
      if (attempt >= kMaxReprompts) throw;
      attempt_prompt = fmt::format(
          "{}\n\n### Previous reply was rejected\n{}\nReply again with exactly one JSON object in the "
          "requested format.",
          prompt, e.what());
    }
  }
}

Plan AgentSession::propose_plan(std::string_view goal, std::string_view app_name, std::string_view screen_text,
                                const std::vector<std::string>& instruction_steps) {
  Plan plan;
  plan.goal = std::string(goal);
  try {
    plan.steps = call_parsed<std::vector<PlanStep>>(AgentRole::Planner, kPlannerTemplate,
                                                    planner_prompt(goal, app_name, screen_text, instruction_steps),
                                                    parse_plan_steps);
  } catch (const ParseError& e) {
    throw PlanningError(fmt::format("planner response unusable after {} reprompts: {}", kMaxReprompts, e.what()));
  }
  return plan;
}

Plan AgentSession::replan(const Plan& previous, std::size_t step_index, std::string_view feedback,
                          std::string_view screen_text) {
  if (step_index >= previous.steps.size()) {
    throw PlanningError(fmt::format("replan at step {} of a {}-step plan", step_index, previous.steps.size()));
  }
  Plan plan;
  plan.goal = previous.goal;
  plan.revision = previous.revision + 1;
  plan.steps.assign(previous.steps.begin(), previous.steps.begin() + static_cast<std::ptrdiff_t>(step_index));
  try {
    auto tail = call_parsed<std::vector<PlanStep>>(AgentRole::Planner, kReplannerTemplate,
                                                   replanner_prompt(previous, step_index, feedback, screen_text),
                                                   parse_plan_steps);
    plan.steps.insert(plan.steps.end(), tail.begin(), tail.end());
  } catch (const ParseError& e) {
    throw PlanningError(fmt::format("replanner response unusable after {} reprompts: {}", kMaxReprompts, e.what()));
  }
  return plan;
}

ActionCommand AgentSession::next_action(const PlanStep& step, std::string_view screen_text) {
  ActionCommand cmd;
  try {
    cmd = call_parsed<ActionCommand>(AgentRole::Action, kActionTemplate, action_prompt(step, screen_text),
                                     parse_action_command);
  } catch (const ParseError& e) {
    throw ActionError(fmt::format("action response unusable after {} reprompts: {}", kMaxReprompts, e.what()));
  }
  std::set<int> ids;
  for (const auto& e : parse_element_lines(screen_text)) ids.insert(e.id);
  auto check = [&](int id) {
    if (!ids.contains(id)) cmd.action = StopAction{fmt::format("element {} is not on the current screen", id)};
  };
  if (const auto* tap = std::get_if<TapAction>(&cmd.action)) check(tap->id);
  else if (const auto* entry = std::get_if<TextEntryAction>(&cmd.action)) check(entry->id);
  return cmd;
}

EvaluationResult AgentSession::evaluate_action(std::string_view goal, const Plan& plan, std::size_t step_index,
                                               const ActionCommand& command, std::string_view before_text,
                                               std::string_view after_text) {
  try {
    return call_parsed<EvaluationResult>(
        AgentRole::Evaluation, kEvaluationTemplate,
        evaluation_prompt(goal, plan, step_index, command, before_text, after_text), parse_evaluation);
  } catch (const ParseError&) {
    return {"", EvalResult::Failure, "evaluator unparseable"};
  }
}

InstructionGuess AgentSession::extract_instructions(std::string_view raw, const std::vector<std::string>& features) {
  try {
    return call_parsed<InstructionGuess>(AgentRole::Planner, kInstructionTemplate, instruction_prompt(raw, features),
                                         [](std::string_view response) {
                                           const auto j = parse_object(response);
                                           return InstructionGuess{string_field(j, "app_name", false),
                                                                   string_field(j, "feature", false),
                                                                   string_field(j, "goal", false)};
                                         });
  } catch (const ParseError& e) {
    throw SpecError(fmt::format("could not extract test fields: {}", e.what()));
  }
}

}  // namespace a11y
