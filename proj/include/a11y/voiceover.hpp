#pragma once

#include <optional>
#include <string>
#include <vector>

#include "a11y/device.hpp"

namespace a11y {

struct ElementRef {
  std::string screen_id;
  std::string key;
  friend auto operator<=>(const ElementRef&, const ElementRef&) = default;
};

struct Visit {
  ElementRef element;
  std::string caption;
  BoundingBox box;
  friend bool operator==(const Visit&, const Visit&) = default;
};

struct LoopRecord {
  ElementRef repeated_element;
  int first_index = 0;
  int repeat_index = 0;
  bool broke_out = false;
  BoundingBox region;  // box of the repeated element
  friend bool operator==(const LoopRecord&, const LoopRecord&) = default;
};

struct VisitTrace {
  std::vector<Visit> visited;
  bool truncated = false;
  std::optional<LoopRecord> loop;
  std::vector<Visit> tab_visits;  // tab bar pass after the main sweep
};

struct ActivationResult {
  std::optional<ElementRef> activated;
  int swipes_forward = 0;
  int swipes_backward = 0;
  bool missing = false;
  Point requested;
  std::string screen_id;
  BoundingBox target_box;  // the intended element's box when known, else a box around `requested`
  VisitTrace trace;
};

inline constexpr int kReadAllVisitCap = 50;

/// Right Swipe through exposed elements from the first, up to the visit
/// cap, then activate the first tab and visit every tab left to right.
/// Throws StateError when VoiceOver is off.
VisitTrace read_all(Device& device, int visit_cap = kReadAllVisitCap);

/// Locate the element containing (x, y) by VoiceOver navigation and Double
/// Tap it. Tabs are reached by jumping to the leftmost tab first; anything
/// else is searched forward from the cursor, then backward.
ActivationResult activate_from_coordinates(Device& device, Point target, ElementKind ui_type,
                                           std::optional<BoundingBox> intended_box = std::nullopt);

/// Three Finger Swipe scrolling one page. Down reveals the next page, Up the
/// previous one; Left/Right page sideways through screen-level swipe
/// transitions. Returns false when nothing changed.
bool vo_scroll(Device& device, SwipeDirection content);

/// Moves the cursor to the exposed element with the smallest y0 strictly
/// below the loop. Returns false when no such element exists.
bool break_out_of_loop(Device& device, LoopRecord& loop, const BoundingBox& loop_extent);

}  // namespace a11y
