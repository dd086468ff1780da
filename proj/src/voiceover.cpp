#include "a11y/voiceover.hpp"

#include <algorithm>
#include <map>

#include "a11y/errors.hpp"

namespace a11y {

namespace {

void require_voiceover(const Device& device, std::string_view op) {
  if (!device.state().feature.voiceover_on) throw StateError(std::string(op) + ": VoiceOver is off");
  if (!device.app_running()) throw StateError(std::string(op) + ": no app launched");
}

ElementRef ref_of(const Device& device, const ResolvedElement& e) {
  return {device.state().current_screen, e.key};
}

Visit visit_of(const Device& device, const ResolvedElement& e) {
  return {ref_of(device, e), Device::caption_for(e), e.box};
}

std::optional<ResolvedElement> cursor_element(const Device& device) {
  const auto& cursor = device.state().vo_cursor;
  if (!cursor) return std::nullopt;
  for (auto& e : device.vo_order()) {
    if (e.key == *cursor) return e;
  }
  return std::nullopt;
}

std::vector<ResolvedElement> tabs_left_to_right(const Device& device) {
  std::vector<ResolvedElement> tabs;
  for (auto& e : device.vo_order()) {
    if (e.kind == ElementKind::Tab) tabs.push_back(std::move(e));
  }
  std::stable_sort(tabs.begin(), tabs.end(), [](const auto& a, const auto& b) { return a.box.x0 < b.box.x0; });
  return tabs;
}

BoundingBox union_box(const std::vector<Visit>& visits, int from, int to) {
  BoundingBox box = visits[static_cast<std::size_t>(from)].box;
  for (int i = from + 1; i < to; ++i) {
    const auto& b = visits[static_cast<std::size_t>(i)].box;
    box = {std::min(box.x0, b.x0), std::min(box.y0, b.y0), std::max(box.x1, b.x1), std::max(box.y1, b.y1)};
  }
  return box;
}

/// Forward Right Swipe traversal with loop detection shared by read-all and
/// the forward search of activate-from-coordinates.
class ForwardSweep {
 public:
  ForwardSweep(Device& device, VisitTrace& trace) : device_(device), trace_(trace) {}

  void start_at(const ResolvedElement& e) { note(e); }

  /// One Right Swipe. Returns the newly focused element, or nullopt when the
  /// sweep must stop (end of order, or an unbreakable / second loop).
  std::optional<ResolvedElement> step() {
    const auto current = device_.state().vo_cursor;
    if (!current) return std::nullopt;
    auto next = device_.vo_successor(*current);
    if (!next) {
      device_.vo_gesture_noop("vo_right_swipe");
      return std::nullopt;
    }
    device_.vo_focus(*next, "vo_right_swipe");
    ++swipes_;
    const auto ref = ref_of(device_, *next);
    auto it = seen_.find(ref);
    if (it == seen_.end()) {
      note(*next);
      return next;
    }
    const int first = it->second;
    trace_.visited.push_back(visit_of(device_, *next));
    if (trace_.loop) return std::nullopt;
    LoopRecord loop{ref, first, static_cast<int>(trace_.visited.size()) - 1, false, next->box};
    const auto extent = union_box(trace_.visited, first, loop.repeat_index);
    const bool escaped = break_out_of_loop(device_, loop, extent);
    trace_.loop = loop;
    if (!escaped) return std::nullopt;
    auto landed = cursor_element(device_);
    if (!landed || seen_.contains(ref_of(device_, *landed))) return std::nullopt;
    note(*landed);
    return landed;
  }

  int swipes() const { return swipes_; }

 private:
  void note(const ResolvedElement& e) {
    seen_.emplace(ref_of(device_, e), static_cast<int>(trace_.visited.size()));
    trace_.visited.push_back(visit_of(device_, e));
  }

  Device& device_;
  VisitTrace& trace_;
  std::map<ElementRef, int> seen_;
  int swipes_ = 0;
};

}  // namespace

bool break_out_of_loop(Device& device, LoopRecord& loop, const BoundingBox& loop_extent) {
  std::optional<ResolvedElement> best;
  for (auto& e : device.vo_order()) {
    if (e.box.y0 <= loop_extent.y1) continue;
    if (!best || e.box.y0 < best->box.y0) best = std::move(e);
  }
  if (!best) return false;
  device.vo_focus(*best, "vo_jump");
  loop.broke_out = true;
  return true;
}

VisitTrace read_all(Device& device, int visit_cap) {
  require_voiceover(device, "read_all");
  VisitTrace trace;
  const auto order = device.vo_order();
  if (!order.empty() && visit_cap > 0) {
    ForwardSweep sweep(device, trace);
    device.vo_focus(order.front(), "vo_jump");
    sweep.start_at(order.front());
    while (static_cast<int>(trace.visited.size()) < visit_cap) {
      if (!sweep.step()) break;
    }
    if (static_cast<int>(trace.visited.size()) >= visit_cap) {
      const auto& cursor = device.state().vo_cursor;
      trace.truncated = cursor && device.vo_successor(*cursor).has_value();
    }
  }

  auto tabs = tabs_left_to_right(device);
  if (tabs.empty()) return trace;
  device.vo_focus(tabs.front(), "vo_jump");
  device.vo_activate();
  tabs = tabs_left_to_right(device);
  for (std::size_t i = 0; i < tabs.size(); ++i) {
    device.vo_focus(tabs[i], i == 0 ? "vo_jump" : "vo_right_swipe");
    trace.tab_visits.push_back(visit_of(device, tabs[i]));
  }
  return trace;
}

ActivationResult activate_from_coordinates(Device& device, Point target, ElementKind ui_type,
                                           std::optional<BoundingBox> intended_box) {
  require_voiceover(device, "activate_from_coordinates");
  ActivationResult result;
  result.requested = target;
  result.screen_id = device.state().current_screen;
  result.target_box = intended_box.value_or(BoundingBox{std::max(0, target.x - 10), std::max(0, target.y - 10),
                                                        target.x + 10, target.y + 10});
  auto contains = [&](const ResolvedElement& e) { return e.box.contains(target.x, target.y); };
  auto activate = [&](const ResolvedElement& e) {
    result.activated = ref_of(device, e);
    device.vo_activate();
  };

  if (ui_type == ElementKind::Tab) {
    const auto tabs = tabs_left_to_right(device);
    if (!tabs.empty()) {
      device.vo_focus(tabs.front(), "vo_jump");
      ForwardSweep sweep(device, result.trace);
      sweep.start_at(tabs.front());
      std::optional<ResolvedElement> current = tabs.front();
      while (current) {
        if (current->kind == ElementKind::Tab && contains(*current)) {
          result.swipes_forward = sweep.swipes();
          activate(*current);
          return result;
        }
        current = sweep.step();
      }
      result.swipes_forward = sweep.swipes();
      result.missing = true;
      return result;
    }
  }

  auto start = cursor_element(device);
  if (!start) {
    const auto order = device.vo_order();
    if (order.empty()) {
      result.missing = true;
      return result;
    }
    start = order.front();
    device.vo_focus(*start, "vo_jump");
  }
  if (contains(*start)) {
    activate(*start);
    return result;
  }

  {
    ForwardSweep sweep(device, result.trace);
    sweep.start_at(*start);
    while (auto next = sweep.step()) {
      if (contains(*next)) {
        result.swipes_forward = sweep.swipes();
        activate(*next);
        return result;
      }
    }
    result.swipes_forward = sweep.swipes();
  }

  std::map<ElementRef, int> seen_backward;
  while (true) {
    const auto& cursor = device.state().vo_cursor;
    if (!cursor) break;
    auto prev = device.vo_predecessor(*cursor);
    if (!prev) {
      device.vo_gesture_noop("vo_left_swipe");
      break;
    }
    device.vo_focus(*prev, "vo_left_swipe");
    ++result.swipes_backward;
    if (!seen_backward.emplace(ref_of(device, *prev), result.swipes_backward).second) break;
    result.trace.visited.push_back(visit_of(device, *prev));
    if (contains(*prev)) {
      activate(*prev);
      return result;
    }
  }
  result.missing = true;
  return result;
}

bool vo_scroll(Device& device, SwipeDirection content) {
  require_voiceover(device, "vo_scroll");
  switch (content) {
    case SwipeDirection::Down: return device.scroll(SwipeDirection::Up, "vo_three_finger_swipe");
    case SwipeDirection::Up: return device.scroll(SwipeDirection::Down, "vo_three_finger_swipe");
    case SwipeDirection::Left:
    case SwipeDirection::Right: {
      const auto before = device.state().current_screen;
      const auto& model = device.current_app_model();
      device.swipe(content, {model.screen_width / 2, model.screen_height / 2});
      return device.state().current_screen != before;
    }
  }
  return false;
}

}  // namespace a11y
