#include "a11y/app_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "a11y/errors.hpp"

namespace a11y {

namespace {

using nlohmann::json;

constexpr std::pair<DynamicTypeSize, std::string_view> kSizeNames[] = {
    {DynamicTypeSize::Off, "Off"},   {DynamicTypeSize::XL, "XL"},   {DynamicTypeSize::XXL, "XXL"},
    {DynamicTypeSize::XXXL, "XXXL"}, {DynamicTypeSize::AX1, "AX1"},
};

bool default_clickable(ElementKind kind) {
  switch (kind) {
    case ElementKind::Button:
    case ElementKind::Tab:
    case ElementKind::Toggle:
    case ElementKind::TextField: return true;
    default: return false;
  }
}

BoundingBox parse_box(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw LoadError(fmt::format("{}: box must be [x0, y0, x1, y1]", where));
  }
  BoundingBox b{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
  if (!b.valid()) throw LoadError(fmt::format("{}: invalid box", where));
  return b;
}

std::optional<TransitionAction> parse_action(std::string_view s) {
  if (s == "tap") return TransitionAction::Tap;
  if (s == "submit") return TransitionAction::Submit;
  if (s == "swipe_left") return TransitionAction::SwipeLeft;
  if (s == "swipe_right") return TransitionAction::SwipeRight;
  return std::nullopt;
}

ElementDef parse_element(const json& j, const std::string& screen_id, const AppModel& app) {
  const std::string key = j.value("key", "");
  const std::string where = fmt::format("screen '{}' element '{}'", screen_id, key);
  if (key.empty()) throw LoadError(fmt::format("screen '{}': element without key", screen_id));

  ElementDef e;
  e.key = key;
  const auto kind_name = j.value("kind", "");
  auto kind = parse_element_kind(kind_name);
  if (!kind) throw LoadError(fmt::format("{}: unknown kind '{}'", where, kind_name));
  e.kind = *kind;
  if (j.contains("text") && !j["text"].is_null()) e.text = j["text"].get<std::string>();
  e.clickable = j.value("clickable", default_clickable(e.kind));
  if (e.kind == ElementKind::Tab && !e.clickable) {
    throw LoadError(fmt::format("{}: Tab elements must be clickable", where));
  }
  if (!j.contains("box")) throw LoadError(fmt::format("{}: missing box", where));
  e.box = parse_box(j["box"], where);
  if (e.box.x1 > app.screen_width || e.box.y1 > app.screen_height) {
    throw LoadError(fmt::format("{}: box outside the {}x{} screen", where, app.screen_width,
                                app.screen_height));
  }
  if (j.contains("size_boxes")) {
    for (const auto& [name, box] : j["size_boxes"].items()) {
      auto size = parse_dynamic_type_size(name);
      if (!size || *size == DynamicTypeSize::Off) {
        throw LoadError(fmt::format("{}: unknown Dynamic Type size '{}'", where, name));
      }
      e.size_boxes[*size] = parse_box(box, where);
    }
  }
  const auto dt = j.value("dynamic_type", "scale");
  if (dt == "scale") e.dynamic_type = DynamicTypeBehavior::Scale;
  else if (dt == "static") e.dynamic_type = DynamicTypeBehavior::Static;
  else throw LoadError(fmt::format("{}: dynamic_type must be 'scale' or 'static'", where));
  e.underline = j.value("underline", false);
  if (j.contains("container") && !j["container"].is_null()) e.container = j["container"].get<std::string>();
  e.accessibility_exposed = j.value("exposed", true);
  if (j.contains("vo_order") && !j["vo_order"].is_null()) e.vo_order_index = j["vo_order"].get<int>();
  if (j.contains("vo_next") && !j["vo_next"].is_null()) e.vo_next = j["vo_next"].get<std::string>();
  if (!e.accessibility_exposed && e.vo_order_index) {
    throw LoadError(fmt::format("{}: unexposed elements cannot carry vo_order", where));
  }
  e.page = j.value("page", 0);
  e.fixed = j.value("fixed", false);
  e.return_key = j.value("return_key", "return");
  return e;
}

ScreenDef parse_screen(const std::string& id, const json& j, const AppModel& app) {
  ScreenDef s;
  s.id = id;
  s.title = j.value("title", id);
  s.scroll_extent = j.value("scroll_extent", 0);
  if (s.scroll_extent < 0) throw LoadError(fmt::format("screen '{}': negative scroll_extent", id));

  std::set<std::string> keys;
  std::set<int> orders;
  for (const auto& ej : j.value("elements", json::array())) {
    auto e = parse_element(ej, id, app);
    if (!keys.insert(e.key).second) {
      throw LoadError(fmt::format("screen '{}': duplicate element key '{}'", id, e.key));
    }
    if (e.vo_order_index && !orders.insert(*e.vo_order_index).second) {
      throw LoadError(fmt::format("screen '{}' element '{}': duplicate vo_order {}", id, e.key,
                                  *e.vo_order_index));
    }
    if (e.page < 0 || e.page > s.scroll_extent) {
      throw LoadError(fmt::format("screen '{}' element '{}': page {} outside scroll extent", id,
                                  e.key, e.page));
    }
    s.elements.push_back(std::move(e));
  }
  for (const auto& e : s.elements) {
    if (e.vo_next && !keys.contains(*e.vo_next)) {
      throw LoadError(fmt::format("screen '{}' element '{}': vo_next refers to unknown element '{}'",
                                  id, e.key, *e.vo_next));
    }
    if (e.container && !keys.contains(*e.container)) {
      throw LoadError(fmt::format("screen '{}' element '{}': unknown container '{}'", id, e.key,
                                  *e.container));
    }
  }
  for (const auto& tj : j.value("transitions", json::array())) {
    Transition t;
    t.element = tj.value("element", std::string(kAnyElement));
    const auto action_name = tj.value("action", "tap");
    auto action = parse_action(action_name);
    if (!action) {
      throw LoadError(fmt::format("screen '{}': unknown transition action '{}'", id, action_name));
    }
    t.action = *action;
    t.target = tj.value("target", "");
    if (tj.contains("query")) t.query = tj["query"].get<std::string>();
    if (t.element != kAnyElement && !keys.contains(t.element)) {
      throw LoadError(fmt::format("screen '{}': transition from unknown element '{}'", id, t.element));
    }
    s.transitions.push_back(std::move(t));
  }
  return s;
}

}  // namespace

std::string_view to_string(DynamicTypeSize size) {
  for (const auto& [s, name] : kSizeNames) {
    if (s == size) return name;
  }
  return "Off";
}

std::optional<DynamicTypeSize> parse_dynamic_type_size(std::string_view name) {
  for (const auto& [s, n] : kSizeNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

double dynamic_type_scale(DynamicTypeSize size) {
  switch (size) {
    case DynamicTypeSize::Off: return 1.0;
    case DynamicTypeSize::XL: return 1.15;
    case DynamicTypeSize::XXL: return 1.3;
    case DynamicTypeSize::XXXL: return 1.5;
    case DynamicTypeSize::AX1: return 1.8;
  }
  return 1.0;
}

std::string_view to_string(TransitionAction action) {
  switch (action) {
    case TransitionAction::Tap: return "tap";
    case TransitionAction::Submit: return "submit";
    case TransitionAction::SwipeLeft: return "swipe_left";
    case TransitionAction::SwipeRight: return "swipe_right";
  }
  return "tap";
}

const ElementDef* ScreenDef::find(std::string_view key) const {
  for (const auto& e : elements) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const ScreenDef& AppModel::screen(std::string_view id) const {
  auto it = screens.find(std::string(id));
  if (it == screens.end()) throw StateError(fmt::format("app '{}': unknown screen '{}'", app_id, id));
  return it->second;
}

AppModel load_app(const json& j) {
  AppModel app;
  try {
    if (!j.is_object()) throw LoadError("app definition must be an object");
    if (!j.contains("format_version")) throw LoadError("missing format_version");
    app.format_version = j["format_version"].get<int>();
    if (app.format_version != kAppFormatVersion) {
      throw LoadError(fmt::format("unsupported format_version {}", app.format_version));
    }
    app.app_id = j.value("app_id", "");
    if (app.app_id.empty()) throw LoadError("missing app_id");
    app.app_name = j.value("app_name", app.app_id);
    if (j.contains("screen_size")) {
      app.screen_width = j["screen_size"].at(0).get<int>();
      app.screen_height = j["screen_size"].at(1).get<int>();
    }
    if (app.screen_width < 1 || app.screen_height < 1) throw LoadError("screen_size must be positive");
    app.initial_screen = j.value("initial_screen", "");
    if (!j.contains("screens") || !j["screens"].is_object() || j["screens"].empty()) {
      throw LoadError("screens must be a non-empty object");
    }
    for (const auto& [id, sj] : j["screens"].items()) {
      app.screens.emplace(id, parse_screen(id, sj, app));
    }
    if (!app.screens.contains(app.initial_screen)) {
      throw LoadError(fmt::format("initial_screen: unknown screen '{}'", app.initial_screen));
    }
    for (const auto& [id, screen] : app.screens) {
      for (const auto& t : screen.transitions) {
        if (t.target != kBackTarget && !app.screens.contains(t.target)) {
          throw LoadError(fmt::format("screen '{}' transition from '{}': unknown screen '{}'", id,
                                      t.element, t.target));
        }
      }
    }
    for (const auto& ij : j.value("interruptions", json::array())) {
      Interruption in{ij.at("on_enter").get<std::string>(), ij.at("show").get<std::string>()};
      if (!app.screens.contains(in.on_enter) || !app.screens.contains(in.show)) {
        throw LoadError(fmt::format("interruption: unknown screen '{}' or '{}'", in.on_enter, in.show));
      }
      app.interruptions.push_back(std::move(in));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw LoadError(fmt::format("app '{}': malformed definition: {}", app.app_id, ex.what()));
  }
  return app;
}

AppModel load_app_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("cannot open app definition '{}'", path.string()));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw LoadError(fmt::format("'{}': {}", path.string(), ex.what()));
  }
  return load_app(j);
}

}  // namespace a11y

namespace a11y {

namespace {

BoundingBox scale_box(const BoundingBox& b, double scale, bool anchor_right, int screen_height) {
  const int w = static_cast<int>(std::lround(b.width() * scale));
  const int h = static_cast<int>(std::lround(b.height() * scale));
  BoundingBox out = b;
  if (anchor_right) out.x0 = b.x1 - w;
  else out.x1 = b.x0 + w;
  // Elements in the lower half grow upward so bottom bars stay on screen.
  if (b.y0 + b.y1 > screen_height) out.y0 = b.y1 - h;
  else out.y1 = b.y0 + h;
  return out;
}

}  // namespace

BoundingBox resolve_box(const ElementDef& e, const AccessibilityFeatureState& feature, int width,
                        int height) {
  BoundingBox b = e.box;
  const auto size = feature.dynamic_type_size;
  if (size != DynamicTypeSize::Off) {
    if (auto it = e.size_boxes.find(size); it != e.size_boxes.end()) {
      b = it->second;
    } else if (e.dynamic_type == DynamicTypeBehavior::Scale &&
               (e.has_text() || e.kind == ElementKind::Icon)) {
      b = scale_box(b, dynamic_type_scale(size), e.kind == ElementKind::Icon, height);
    }
  }
  if (feature.bold_text_on && e.has_text()) b.x1 += std::max(1, b.width() / 20);
  b.x0 = std::clamp(b.x0, 0, width);
  b.x1 = std::clamp(b.x1, b.x0, width);
  b.y0 = std::clamp(b.y0, 0, height);
  b.y1 = std::clamp(b.y1, b.y0, height);
  return b;
}

std::vector<ResolvedElement> resolve_elements(const ScreenDef& screen,
                                              const AccessibilityFeatureState& feature, int width,
                                              int height, int scroll_offset) {
  std::vector<ResolvedElement> out;
  for (const auto& e : screen.elements) {
    if (!e.fixed && e.page != scroll_offset) continue;
    ResolvedElement r;
    r.def = &e;
    r.key = e.key;
    r.kind = e.kind;
    r.text = e.text;
    r.clickable = e.clickable;
    r.box = resolve_box(e, feature, width, height);
    r.underline = e.underline;
    r.exposed = e.accessibility_exposed;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace a11y
