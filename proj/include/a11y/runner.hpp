#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "a11y/agents.hpp"
#include "a11y/device.hpp"
#include "a11y/heuristics.hpp"
#include "a11y/imaging.hpp"
#include "a11y/voiceover.hpp"

namespace a11y {

enum class Feature { VoiceOver, DynamicType, BoldText, ButtonShapes };
enum class Difficulty { Easy, Hard };

std::string_view to_string(Feature feature);
std::optional<Feature> parse_feature(std::string_view name);
/// Recognizes feature names and common synonyms ("VO", "Large Text", ...).
std::optional<Feature> match_feature_synonym(std::string_view phrase);
std::vector<std::string> supported_feature_names();
std::string_view to_string(Difficulty difficulty);
std::optional<Difficulty> parse_difficulty(std::string_view name);

struct TestSpec {
  std::string title;
  std::string platform;
  std::string app_name;
  Feature feature = Feature::VoiceOver;
  std::string goal;
  std::vector<std::string> steps;
  std::optional<std::string> expected_results;
  std::optional<Difficulty> difficulty;
  std::optional<std::string> target_screen;  // screen id the navigation must end on
  bool verify_vo_order = false;

  friend bool operator==(const TestSpec&, const TestSpec&) = default;
};

struct InstructionContext {
  std::vector<std::string> known_apps;      // app names that may appear in the text
  std::optional<std::string> default_app;   // used when the text names no app
  AgentSession* fallback = nullptr;         // one extraction call when rules fail
};

/// Rules first: colon-delimited title (platform, app, feature, goal),
/// numbered steps, "Expected Results:", "Target Screen:" and "Difficulty:"
/// lines. Falls back to a single planner extraction call. Throws SpecError.
TestSpec parse_instructions(std::string_view raw, const InstructionContext& ctx = {});

enum class NavigationStatus { Reached, Partial, Failed };
enum class FinalStatus { Success, Partial, Fail };

std::string_view to_string(NavigationStatus status);
std::string_view to_string(FinalStatus status);
std::optional<FinalStatus> parse_final_status(std::string_view name);

struct Overlay {
  enum class Kind { Crosshair, Arrow, Box };
  Kind kind = Kind::Crosshair;
  Point point;
  SwipeDirection direction = SwipeDirection::Up;
  BoundingBox box;
  ColorRole color = ColorRole::IssueOrange;  // Box only

  friend bool operator==(const Overlay&, const Overlay&) = default;
};

/// A captured screen, rendered at export time.
struct FrameRecord {
  long long t_ms = 0;
  std::string label;
  std::string screen_id;
  int width = 0;
  int height = 0;
  AccessibilityFeatureState feature;
  std::vector<ResolvedElement> elements;  // definitions detached
  std::vector<Overlay> overlays;
};

PixelBuffer render_frame(const FrameRecord& frame);

struct PassSummary {
  int index = 0;
  std::string label;
  NavigationStatus navigation = NavigationStatus::Failed;
  std::string final_screen;
  bool reached_target = false;
  int steps_succeeded = 0;
  std::string explanation;

  friend bool operator==(const PassSummary&, const PassSummary&) = default;
};

struct SessionRecording {
  TestSpec spec;
  std::vector<SessionEvent> events;
  std::vector<FrameRecord> frames;
  std::vector<HeuristicFinding> findings;
  std::vector<PassSummary> passes;
  std::vector<LLMExchange> exchanges;
  FinalStatus final_status = FinalStatus::Fail;
  std::string status_detail;
};

struct RunnerConfig {
  int max_actions = 40;
  int max_replans = 5;
  double caption_height_frac = kDefaultCaptionHeightFrac;
  long long finding_dwell_ms = 500;
  HeuristicConfig heuristics;
};

/// Agent-facing view of the device screen: keyboard keys and the caption
/// panel filtered out, ids renumbered.
struct ObservedScreen {
  ScreenSnapshot snapshot;
  std::string text;  // serialized elements, plus "[Keyboard visible]" when shown
};

ObservedScreen observe(const Device& device, const RunnerConfig& config);

struct NavigationOutcome {
  NavigationStatus status = NavigationStatus::Failed;
  Plan plan;
  int actions = 0;
  int replans = 0;
  int steps_succeeded = 0;
  std::string explanation;
};

/// One test session: device, agents and the recording under construction.
class Session {
 public:
  Session(Device& device, LLMClient& client, RunnerConfig config = {});

  Device& device() { return device_; }
  AgentSession& agents() { return agents_; }
  const RunnerConfig& config() const { return config_; }

  /// Plan -> act -> evaluate until the plan is done, the evaluator reports
  /// completion, or a budget runs out. `on_step_success` fires after each
  /// step judged successful.
  NavigationOutcome run_navigation(std::string_view goal, std::string_view app_name,
                                   const std::vector<std::string>& instruction_steps = {},
                                   const std::function<void()>& on_step_success = {});

  void chapter(std::string title);
  int capture_frame(std::string label, std::vector<Overlay> overlays = {});
  int screenshot(std::string label);
  /// Annotated frame of `source_frame` (default: the current screen, or the
  /// last captured one when no app is running) plus one event per finding.
  void add_findings(const std::vector<HeuristicFinding>& findings, std::string label,
                    std::optional<int> source_frame = std::nullopt);

  const std::vector<ActivationResult>& activations() const { return activations_; }
  void clear_activations() { activations_.clear(); }

  std::vector<FrameRecord>& frames() { return frames_; }
  std::vector<HeuristicFinding>& findings() { return findings_; }

 private:
  void plan_revision(const Plan& plan);
  std::vector<Overlay> overlays_for(const ActionCommand& cmd, const ObservedScreen& screen) const;
  void execute(const ActionCommand& cmd, const ObservedScreen& screen);

  Device& device_;
  AgentSession agents_;
  RunnerConfig config_;
  std::vector<FrameRecord> frames_;
  std::vector<HeuristicFinding> findings_;
  std::vector<ActivationResult> activations_;
};

/// Feature-specific replay: Dynamic Type over four sizes then Off; Bold
/// Text and Button Shapes with the feature on then off; VoiceOver on then
/// off. Navigation failures still yield a recording.
SessionRecording run_test(const TestSpec& spec, const AppModel& app, LLMClient& client,
                          const RunnerConfig& config = {});

}  // namespace a11y
