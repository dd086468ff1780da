#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "a11y/app_model.hpp"
#include "a11y/session_log.hpp"
#include "a11y/ui_model.hpp"

namespace a11y {

enum class SwipeDirection { Up, Down, Left, Right };

std::string_view to_string(SwipeDirection d);
std::optional<SwipeDirection> parse_swipe_direction(std::string_view name);

struct DeviceState {
  std::optional<std::string> current_app;
  std::string current_screen;
  int scroll_offset = 0;
  AccessibilityFeatureState feature;
  std::optional<std::string> vo_cursor;  // element key on the current screen
  bool recording = false;
  bool keyboard_visible = false;
  std::optional<std::string> focused_field;
  std::map<std::string, std::string> field_text;  // "<screen>/<key>" -> typed text
  std::vector<std::string> history;
  std::set<std::string> fired_interruptions;
  std::string caption;  // last VoiceOver caption
};

/// Simulated milliseconds charged per device action.
struct ActionCosts {
  long long tap = 300;
  long long swipe = 500;
  long long vo_gesture = 400;
  long long keystroke = 100;
  long long launch = 1500;
  long long kill = 300;
  long long feature = 200;
  long long screenshot = 100;
  double caption_ms_per_char = 25.0;  // at speaking rate 1.0
};

inline constexpr double kVoiceOverSpeakingRate = 0.25;
inline constexpr std::string_view kCaptionPanelKey = "$caption_panel";
inline constexpr std::string_view kKeyboardKeyPrefix = "$kbd:";

/// Deterministic simulated phone. One instance per test session; every
/// state-changing call is appended to the session log.
class Device {
 public:
  Device() = default;
  explicit Device(AppModel app) { install(std::move(app)); }

  void install(AppModel app);
  bool has_app(std::string_view app_id) const;
  const AppModel& app(std::string_view app_id) const;

  ScreenSnapshot launch_app(std::string_view app_id);
  void kill_app();
  /// Switches the running app to `screen_id` as if navigated there; no
  /// event is recorded. Used by tooling that inspects a single screen.
  ScreenSnapshot show_screen(std::string_view screen_id);

  ScreenSnapshot tap(Point point);
  ScreenSnapshot swipe(SwipeDirection direction, Point origin);
  ScreenSnapshot type_text(Point field, std::string_view text);
  void set_feature(const FeatureChange& change);

  ScreenSnapshot snapshot() const;

  /// Visible elements with resolved geometry, including the on-screen keyboard
  /// and caption panel overlays when present.
  std::vector<ResolvedElement> visible_elements() const;

  // VoiceOver primitives used by the gesture engine.
  std::vector<ResolvedElement> vo_order() const;
  std::optional<ResolvedElement> vo_successor(std::string_view key) const;
  std::optional<ResolvedElement> vo_predecessor(std::string_view key) const;
  void vo_focus(const ResolvedElement& element, std::string_view gesture);
  void vo_gesture_noop(std::string_view gesture);
  /// Double Tap on the element under the VoiceOver cursor.
  void vo_activate();
  /// One-page scroll; returns false at scroll bounds.
  bool scroll(SwipeDirection direction, std::string_view gesture_name);

  static std::string caption_for(const ResolvedElement& element);

  const DeviceState& state() const { return state_; }
  bool app_running() const { return state_.current_app.has_value(); }
  const AppModel& current_app_model() const;
  const ScreenDef& current_screen_def() const;

  SessionLog& log() { return log_; }
  const SessionLog& log() const { return log_; }

  ActionCosts costs;

 private:
  void require_app(std::string_view op) const;
  void record(std::string name, long long duration, std::string detail = {},
              std::optional<Point> point = std::nullopt,
              std::optional<std::string> direction = std::nullopt);
  void enter_screen(const std::string& target);
  void reset_vo_cursor();
  void activate(const ResolvedElement& element);
  void submit_focused_field();
  const Transition* find_transition(std::string_view element, TransitionAction action,
                                    std::optional<std::string_view> query = std::nullopt) const;
  std::vector<ResolvedElement> keyboard_keys() const;
  int keyboard_top() const;
  std::string field_slot(std::string_view key) const;
  long long caption_dwell(std::string_view caption) const;

  std::map<std::string, AppModel, std::less<>> apps_;
  DeviceState state_;
  SessionLog log_;
};

}  // namespace a11y
