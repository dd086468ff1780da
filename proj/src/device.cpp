#include "a11y/device.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "a11y/errors.hpp"
#include "a11y/text_util.hpp"

namespace a11y {

namespace {

constexpr std::string_view kKeyboardRows[] = {"qwertyuiop", "asdfghjkl", "zxcvbnm"};

bool smaller_area(const ResolvedElement& a, const ResolvedElement& b) {
  return a.box.area() < b.box.area();
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Action: return "action";
    case EventKind::Screenshot: return "screenshot";
    case EventKind::Finding: return "finding";
    case EventKind::PlanRevision: return "plan_revision";
    case EventKind::ChapterBoundary: return "chapter_boundary";
  }
  return "action";
}

std::string_view to_string(SwipeDirection d) {
  switch (d) {
    case SwipeDirection::Up: return "up";
    case SwipeDirection::Down: return "down";
    case SwipeDirection::Left: return "left";
    case SwipeDirection::Right: return "right";
  }
  return "up";
}

std::optional<SwipeDirection> parse_swipe_direction(std::string_view name) {
  const auto n = text::to_lower_ascii(name);
  if (n == "up") return SwipeDirection::Up;
  if (n == "down") return SwipeDirection::Down;
  if (n == "left") return SwipeDirection::Left;
  if (n == "right") return SwipeDirection::Right;
  return std::nullopt;
}

void Device::install(AppModel app) {
  auto id = app.app_id;
  apps_.insert_or_assign(std::move(id), std::move(app));
}

bool Device::has_app(std::string_view app_id) const { return apps_.find(app_id) != apps_.end(); }

const AppModel& Device::app(std::string_view app_id) const {
  auto it = apps_.find(app_id);
  if (it == apps_.end()) throw StateError(fmt::format("unknown app '{}'", app_id));
  return it->second;
}

const AppModel& Device::current_app_model() const {
  require_app("query");
  return app(*state_.current_app);
}

const ScreenDef& Device::current_screen_def() const {
  return current_app_model().screen(state_.current_screen);
}

void Device::require_app(std::string_view op) const {
  if (!state_.current_app) throw StateError(fmt::format("{}: no app launched", op));
}

void Device::record(std::string name, long long duration, std::string detail,
                    std::optional<Point> point, std::optional<std::string> direction) {
  SessionEvent ev;
  ev.kind = EventKind::Action;
  ev.duration_ms = duration;
  ev.name = std::move(name);
  ev.detail = std::move(detail);
  ev.screen_id = state_.current_screen;
  ev.point = point;
  ev.direction = std::move(direction);
  ev.pass_index = log_.current_pass();
  log_.append(std::move(ev));
}

ScreenSnapshot Device::launch_app(std::string_view app_id) {
  const auto& model = app(app_id);
  state_.current_app = model.app_id;
  state_.current_screen = model.initial_screen;
  state_.scroll_offset = 0;
  state_.history.clear();
  state_.keyboard_visible = false;
  state_.focused_field.reset();
  state_.field_text.clear();
  state_.recording = true;
  state_.caption.clear();
  record("launch", costs.launch, model.app_id);
  enter_screen(model.initial_screen);
  state_.history.clear();
  return snapshot();
}

void Device::kill_app() {
  if (!state_.current_app) return;
  record("kill", costs.kill, *state_.current_app);
  state_.current_app.reset();
  state_.current_screen.clear();
  state_.scroll_offset = 0;
  state_.vo_cursor.reset();
  state_.keyboard_visible = false;
  state_.focused_field.reset();
  state_.recording = false;
}

ScreenSnapshot Device::show_screen(std::string_view screen_id) {
  require_app("show_screen");
  if (!current_app_model().screens.contains(std::string(screen_id))) {
    throw StateError(fmt::format("unknown screen '{}'", screen_id));
  }
  enter_screen(std::string(screen_id));
  return snapshot();
}

void Device::enter_screen(const std::string& target) {
  const auto& model = current_app_model();
  if (target == kBackTarget) {
    if (state_.history.empty()) return;
    state_.current_screen = state_.history.back();
    state_.history.pop_back();
  } else if (target != state_.current_screen || state_.history.empty()) {
    if (!state_.current_screen.empty() && target != state_.current_screen) {
      state_.history.push_back(state_.current_screen);
    }
    state_.current_screen = target;
  }
  state_.scroll_offset = 0;
  state_.keyboard_visible = false;
  state_.focused_field.reset();
  for (const auto& in : model.interruptions) {
    if (in.on_enter == state_.current_screen && !state_.fired_interruptions.contains(in.on_enter)) {
      state_.fired_interruptions.insert(in.on_enter);
      state_.history.push_back(state_.current_screen);
      state_.current_screen = in.show;
      break;
    }
  }
  reset_vo_cursor();
}

void Device::reset_vo_cursor() {
  state_.vo_cursor.reset();
  if (!state_.feature.voiceover_on || !state_.current_app) return;
  const auto order = vo_order();
  if (!order.empty()) state_.vo_cursor = order.front().key;
}

const Transition* Device::find_transition(std::string_view element, TransitionAction action,
                                          std::optional<std::string_view> query) const {
  const auto& screen = current_screen_def();
  const Transition* wildcard = nullptr;
  for (const auto& t : screen.transitions) {
    if (t.element != element || t.action != action) continue;
    if (action != TransitionAction::Submit) return &t;
    if (!query) continue;
    const auto q = t.query.value_or(std::string(kAnyQuery));
    if (q == kAnyQuery) {
      if (!wildcard) wildcard = &t;
    } else if (text::iequals(q, *query)) {
      return &t;
    }
  }
  if (wildcard && query && !query->empty()) return wildcard;
  return nullptr;
}

std::string Device::field_slot(std::string_view key) const {
  return fmt::format("{}/{}", state_.current_screen, key);
}

int Device::keyboard_top() const {
  const int h = current_app_model().screen_height;
  return (2 * h + 2) / 3 + 6;
}

std::vector<ResolvedElement> Device::keyboard_keys() const {
  std::vector<ResolvedElement> keys;
  if (!state_.keyboard_visible) return keys;
  const auto& model = current_app_model();
  const int w = model.screen_width;
  const int h = model.screen_height;
  const int top = keyboard_top();
  const int row_h = (h - top) / 4;
  const int key_w = w / 10;
  auto key = [&](std::string label, int x0, int x1, int row, ElementKind kind) {
    ResolvedElement r;
    r.key = fmt::format("{}{}", kKeyboardKeyPrefix, label);
    r.kind = kind;
    r.text = std::move(label);
    r.clickable = true;
    r.box = {x0 + 2, top + row * row_h + 4, x1 - 2, top + (row + 1) * row_h - 4};
    r.exposed = false;
    keys.push_back(std::move(r));
  };
  for (int row = 0; row < 3; ++row) {
    const auto letters = kKeyboardRows[row];
    const int offset = (w - key_w * static_cast<int>(letters.size())) / 2;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      const int x0 = offset + static_cast<int>(i) * key_w;
      key(std::string(1, letters[i]), x0, x0 + key_w, row, ElementKind::Text);
    }
  }
  std::string return_label = "return";
  if (state_.focused_field) {
    if (const auto* def = current_screen_def().find(*state_.focused_field)) return_label = def->return_key;
  }
  key("space", w / 4, w * 7 / 10, 3, ElementKind::Button);
  key(return_label, w * 72 / 100, w * 98 / 100, 3, ElementKind::Button);
  return keys;
}

std::vector<ResolvedElement> Device::visible_elements() const {
  if (!state_.current_app) return {};
  const auto& model = current_app_model();
  const auto& screen = current_screen_def();
  auto elements = resolve_elements(screen, state_.feature, model.screen_width, model.screen_height,
                                   state_.scroll_offset);
  for (auto& e : elements) {
    if (e.kind == ElementKind::TextField) {
      auto it = state_.field_text.find(field_slot(e.key));
      if (it != state_.field_text.end() && !it->second.empty()) e.text = it->second;
    }
  }
  if (state_.keyboard_visible) {
    const int top = keyboard_top();
    std::erase_if(elements, [&](const ResolvedElement& e) { return e.box.center_y() >= top; });
    auto keys = keyboard_keys();
    elements.insert(elements.end(), keys.begin(), keys.end());
  }
  if (state_.feature.captions_on && !state_.caption.empty()) {
    const int w = model.screen_width;
    const int h = model.screen_height;
    ResolvedElement panel;
    panel.key = std::string(kCaptionPanelKey);
    panel.kind = ElementKind::Text;
    panel.text = state_.caption;
    panel.box = {w / 20, h * 81 / 100, w - w / 20, h * 95 / 100};
    panel.exposed = false;
    elements.push_back(std::move(panel));
  }
  return elements;
}

ScreenSnapshot Device::snapshot() const {
  ScreenSnapshot snap;
  if (!state_.current_app) return snap;
  const auto& model = current_app_model();
  snap.width = model.screen_width;
  snap.height = model.screen_height;
  snap.app_id = model.app_id;
  snap.screen_id = state_.current_screen;
  snap.keyboard_visible = state_.keyboard_visible;
  for (const auto& r : visible_elements()) {
    UIElement e;
    e.kind = r.kind;
    if (r.has_text()) e.text = r.text;
    e.clickable = r.clickable;
    e.box = r.box;
    snap.elements.push_back(std::move(e));
  }
  normalize_snapshot(snap);
  return snap;
}

void Device::activate(const ResolvedElement& element) {
  if (element.key.starts_with(kKeyboardKeyPrefix)) {
    if (!state_.focused_field) return;
    const auto label = element.text.value_or("");
    if (text::codepoint_count(label) == 1) {
      state_.field_text[field_slot(*state_.focused_field)] += label;
    } else if (label == "space") {
      state_.field_text[field_slot(*state_.focused_field)] += " ";
    } else {
      submit_focused_field();
    }
    return;
  }
  if (element.kind == ElementKind::TextField) {
    state_.focused_field = element.key;
    state_.keyboard_visible = true;
    return;
  }
  if (const auto* t = find_transition(element.key, TransitionAction::Tap)) {
    enter_screen(t->target);
  }
}

void Device::submit_focused_field() {
  if (!state_.focused_field) return;
  const auto key = *state_.focused_field;
  const auto text = state_.field_text[field_slot(key)];
  if (const auto* t = find_transition(key, TransitionAction::Submit, text)) {
    enter_screen(t->target);
  }
  state_.keyboard_visible = false;
  state_.focused_field.reset();
}

ScreenSnapshot Device::tap(Point p) {
  require_app("tap");
  auto elements = visible_elements();
  std::stable_sort(elements.begin(), elements.end(), smaller_area);
  if (state_.feature.voiceover_on) {
    // VoiceOver touch exploration: a single tap only moves the cursor.
    record("vo_touch", costs.tap, {}, p);
    for (const auto& e : elements) {
      if (e.exposed && e.def && e.box.contains(p.x, p.y)) {
        vo_focus(e, "vo_touch_focus");
        break;
      }
    }
    return snapshot();
  }
  record("tap", costs.tap, {}, p);
  for (const auto& e : elements) {
    if (!e.box.contains(p.x, p.y)) continue;
    const bool interactive = e.key.starts_with(kKeyboardKeyPrefix) ||
                             e.kind == ElementKind::TextField ||
                             find_transition(e.key, TransitionAction::Tap) != nullptr;
    if (interactive) {
      activate(e);
      break;
    }
  }
  return snapshot();
}

ScreenSnapshot Device::swipe(SwipeDirection direction, Point origin) {
  require_app("swipe");
  record("swipe", costs.swipe, {}, origin, std::string(to_string(direction)));
  if (direction == SwipeDirection::Up || direction == SwipeDirection::Down) {
    scroll(direction, {});
    return snapshot();
  }
  const auto action =
      direction == SwipeDirection::Left ? TransitionAction::SwipeLeft : TransitionAction::SwipeRight;
  auto elements = visible_elements();
  std::stable_sort(elements.begin(), elements.end(), smaller_area);
  for (const auto& e : elements) {
    if (!e.box.contains(origin.x, origin.y)) continue;
    if (const auto* t = find_transition(e.key, action)) {
      enter_screen(t->target);
      return snapshot();
    }
  }
  if (const auto* t = find_transition(kAnyElement, action)) enter_screen(t->target);
  return snapshot();
}

bool Device::scroll(SwipeDirection direction, std::string_view gesture_name) {
  require_app("scroll");
  if (!gesture_name.empty()) {
    record(std::string(gesture_name), costs.vo_gesture, {}, std::nullopt,
           std::string(to_string(direction)));
  }
  const int extent = current_screen_def().scroll_extent;
  int next = state_.scroll_offset;
  if (direction == SwipeDirection::Up) next = std::min(extent, next + 1);
  else if (direction == SwipeDirection::Down) next = std::max(0, next - 1);
  if (next == state_.scroll_offset) return false;
  state_.scroll_offset = next;
  state_.keyboard_visible = false;
  state_.focused_field.reset();
  if (state_.vo_cursor) {
    auto order = vo_order();
    const bool still_visible = std::any_of(order.begin(), order.end(),
                                           [&](const auto& e) { return e.key == *state_.vo_cursor; });
    if (!still_visible) reset_vo_cursor();
  }
  return true;
}

ScreenSnapshot Device::type_text(Point field, std::string_view text) {
  require_app("type_text");
  auto elements = visible_elements();
  std::stable_sort(elements.begin(), elements.end(), smaller_area);
  const ResolvedElement* target = nullptr;
  for (const auto& e : elements) {
    if (e.box.contains(field.x, field.y)) {
      target = &e;
      break;
    }
  }
  if (!target || target->kind != ElementKind::TextField) {
    throw ActionError(fmt::format("type_text: element at ({}, {}) is not a TextField", field.x, field.y));
  }
  const auto keystrokes = static_cast<long long>(text::codepoint_count(text));
  record("type_text", costs.tap + costs.keystroke * keystrokes, std::string(text), field);
  state_.focused_field = target->key;
  state_.keyboard_visible = true;
  state_.field_text[field_slot(target->key)] = std::string(text);
  if (!text.empty() && find_transition(target->key, TransitionAction::Submit, text)) {
    submit_focused_field();
  }
  return snapshot();
}

void Device::set_feature(const FeatureChange& change) {
  auto& f = state_.feature;
  const bool vo_was_on = f.voiceover_on;
  if (change.voiceover_on) f.voiceover_on = *change.voiceover_on;
  if (f.voiceover_on && !vo_was_on) {
    f.captions_on = true;
    f.speaking_rate = kVoiceOverSpeakingRate;
  }
  if (change.speaking_rate) f.speaking_rate = std::clamp(*change.speaking_rate, 0.01, 1.0);
  if (change.captions_on) f.captions_on = *change.captions_on;
  if (change.dynamic_type_size) f.dynamic_type_size = *change.dynamic_type_size;
  if (change.bold_text_on) f.bold_text_on = *change.bold_text_on;
  if (change.button_shapes_on) f.button_shapes_on = *change.button_shapes_on;
  if (!f.voiceover_on) {
    f.captions_on = false;
    state_.vo_cursor.reset();
    state_.caption.clear();
  } else if (!vo_was_on) {
    reset_vo_cursor();
  }
  record("set_feature", costs.feature,
         fmt::format("voiceover={} captions={} rate={} dynamic_type={} bold={} button_shapes={}",
                     f.voiceover_on, f.captions_on, f.speaking_rate, to_string(f.dynamic_type_size),
                     f.bold_text_on, f.button_shapes_on));
}

std::vector<ResolvedElement> Device::vo_order() const {
  std::vector<ResolvedElement> exposed;
  for (auto& e : visible_elements()) {
    if (e.def && e.exposed) exposed.push_back(std::move(e));
  }
  std::vector<ResolvedElement> indexed;
  std::vector<ResolvedElement> rest;
  for (auto& e : exposed) {
    (e.def->vo_order_index ? indexed : rest).push_back(std::move(e));
  }
  std::stable_sort(indexed.begin(), indexed.end(), [](const auto& a, const auto& b) {
    return *a.def->vo_order_index < *b.def->vo_order_index;
  });
  // Unindexed elements follow in reading order.
  std::vector<UIElement> proxies;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    UIElement u;
    u.id = static_cast<int>(i);
    u.box = rest[i].box;
    proxies.push_back(u);
  }
  const int h = current_app_model().screen_height;
  proxies = sort_reading_order(std::move(proxies), default_row_band_px(h));
  for (const auto& p : proxies) indexed.push_back(rest[static_cast<std::size_t>(p.id)]);
  return indexed;
}

std::optional<ResolvedElement> Device::vo_successor(std::string_view key) const {
  const auto order = vo_order();
  auto it = std::find_if(order.begin(), order.end(), [&](const auto& e) { return e.key == key; });
  if (it == order.end()) return std::nullopt;
  if (it->def && it->def->vo_next) {
    auto next = std::find_if(order.begin(), order.end(),
                             [&](const auto& e) { return e.key == *it->def->vo_next; });
    if (next != order.end()) return *next;
  }
  if (std::next(it) == order.end()) return std::nullopt;
  return *std::next(it);
}

std::optional<ResolvedElement> Device::vo_predecessor(std::string_view key) const {
  const auto order = vo_order();
  auto it = std::find_if(order.begin(), order.end(), [&](const auto& e) { return e.key == key; });
  if (it == order.end() || it == order.begin()) return std::nullopt;
  return *std::prev(it);
}

std::string Device::caption_for(const ResolvedElement& element) {
  if (element.has_text()) return *element.text;
  return std::string(to_string(element.kind));
}

long long Device::caption_dwell(std::string_view caption) const {
  const double rate = std::max(state_.feature.speaking_rate, 0.01);
  return std::llround(static_cast<double>(text::codepoint_count(caption)) * costs.caption_ms_per_char / rate);
}

void Device::vo_focus(const ResolvedElement& element, std::string_view gesture) {
  require_app("voiceover");
  state_.vo_cursor = element.key;
  state_.caption = caption_for(element);
  record(std::string(gesture), costs.vo_gesture + caption_dwell(state_.caption), state_.caption,
         Point{element.box.center_x(), element.box.center_y()});
}

void Device::vo_gesture_noop(std::string_view gesture) {
  require_app("voiceover");
  record(std::string(gesture), costs.vo_gesture, "no element");
}

void Device::vo_activate() {
  require_app("voiceover");
  if (!state_.vo_cursor) {
    record("vo_double_tap", costs.vo_gesture, "no focus");
    return;
  }
  const auto key = *state_.vo_cursor;
  const auto elements = visible_elements();
  auto it = std::find_if(elements.begin(), elements.end(), [&](const auto& e) { return e.key == key; });
  if (it == elements.end()) {
    record("vo_double_tap", costs.vo_gesture, "stale focus");
    return;
  }
  record("vo_double_tap", costs.vo_gesture, caption_for(*it),
         Point{it->box.center_x(), it->box.center_y()});
  activate(*it);
}

}  // namespace a11y
