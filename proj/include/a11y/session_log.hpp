#pragma once

#include <optional>
#include <string>
#include <vector>

namespace a11y {

enum class EventKind { Action, Screenshot, Finding, PlanRevision, ChapterBoundary };

std::string_view to_string(EventKind kind);

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// One timeline entry. Timestamps are simulated milliseconds.
struct SessionEvent {
  long long t_ms = 0;
  long long duration_ms = 0;
  EventKind kind = EventKind::Action;
  std::string name;       // action name, chapter title, plan revision label...
  std::string detail;
  std::string screen_id;
  std::optional<Point> point;
  std::optional<std::string> direction;
  std::optional<int> frame_index;
  std::optional<int> finding_index;
  int pass_index = 0;

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

/// Append-only event timeline driven by a simulated clock.
class SessionLog {
 public:
  long long now() const { return now_ms_; }

  /// Appends at the current time, then advances the clock by `event.duration_ms`.
  SessionEvent& append(SessionEvent event) {
    event.t_ms = now_ms_;
    now_ms_ += event.duration_ms;
    events_.push_back(std::move(event));
    return events_.back();
  }

  void advance(long long ms) { now_ms_ += ms; }

  const std::vector<SessionEvent>& events() const { return events_; }
  int current_pass() const { return pass_; }
  void set_pass(int pass) { pass_ = pass; }

 private:
  long long now_ms_ = 0;
  int pass_ = 0;
  std::vector<SessionEvent> events_;
};

}  // namespace a11y
