#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "a11y/ui_model.hpp"

namespace a11y {

enum class DynamicTypeSize { Off, XL, XXL, XXXL, AX1 };

std::string_view to_string(DynamicTypeSize size);
std::optional<DynamicTypeSize> parse_dynamic_type_size(std::string_view name);

/// Text scale relative to Off for each Dynamic Type increment.
double dynamic_type_scale(DynamicTypeSize size);

/// The four increments in increasing order (Off excluded).
inline constexpr DynamicTypeSize kDynamicTypeIncrements[] = {
    DynamicTypeSize::XL, DynamicTypeSize::XXL, DynamicTypeSize::XXXL, DynamicTypeSize::AX1};

struct AccessibilityFeatureState {
  bool voiceover_on = false;
  double speaking_rate = 0.5;
  bool captions_on = false;
  DynamicTypeSize dynamic_type_size = DynamicTypeSize::Off;
  bool bold_text_on = false;
  bool button_shapes_on = false;

  friend bool operator==(const AccessibilityFeatureState&, const AccessibilityFeatureState&) = default;
};

/// Partial update applied by Device::set_feature.
struct FeatureChange {
  std::optional<bool> voiceover_on;
  std::optional<double> speaking_rate;
  std::optional<bool> captions_on;
  std::optional<DynamicTypeSize> dynamic_type_size;
  std::optional<bool> bold_text_on;
  std::optional<bool> button_shapes_on;
};

enum class DynamicTypeBehavior { Scale, Static };

struct ElementDef {
  std::string key;
  ElementKind kind = ElementKind::Other;
  std::optional<std::string> text;
  bool clickable = false;
  BoundingBox box;
  std::map<DynamicTypeSize, BoundingBox> size_boxes;  // explicit per-size overrides
  DynamicTypeBehavior dynamic_type = DynamicTypeBehavior::Scale;
  bool underline = false;                 // drawn while Button Shapes is on
  std::optional<std::string> container;   // key of the enclosing clickable container
  bool accessibility_exposed = true;
  std::optional<int> vo_order_index;
  std::optional<std::string> vo_next;     // overrides the Right Swipe successor (focus trap)
  int page = 0;                           // scroll page the element lives on
  bool fixed = false;                     // visible regardless of scroll (nav/tab bars)
  std::string return_key = "return";      // TextField keyboard submit key label

  bool has_text() const { return text.has_value() && !text->empty(); }
};

enum class TransitionAction { Tap, Submit, SwipeLeft, SwipeRight };

std::string_view to_string(TransitionAction action);

inline constexpr std::string_view kBackTarget = "$back";
inline constexpr std::string_view kAnyElement = "*";
inline constexpr std::string_view kAnyQuery = "*";

struct Transition {
  std::string element;                 // element key, or "*" for screen-level swipes
  TransitionAction action = TransitionAction::Tap;
  std::string target;                  // screen id or "$back"
  std::optional<std::string> query;    // Submit only: exact query (case-insensitive) or "*"
};

struct ScreenDef {
  std::string id;
  std::string title;
  std::vector<ElementDef> elements;
  std::vector<Transition> transitions;
  int scroll_extent = 0;

  const ElementDef* find(std::string_view key) const;
};

/// Overlay screen shown the first time `on_enter` is reached (permission prompts...).
struct Interruption {
  std::string on_enter;
  std::string show;
};

struct AppModel {
  int format_version = 1;
  std::string app_id;
  std::string app_name;
  int screen_width = 390;
  int screen_height = 844;
  std::string initial_screen;
  std::map<std::string, ScreenDef> screens;
  std::vector<Interruption> interruptions;

  const ScreenDef& screen(std::string_view id) const;
};

inline constexpr int kAppFormatVersion = 1;

/// Validates and builds an AppModel. Throws LoadError naming the offending
/// screen/element on any schema or invariant violation.
AppModel load_app(const nlohmann::json& definition);
AppModel load_app_file(const std::filesystem::path& path);

}  // namespace a11y

namespace a11y {

/// An element as it appears in the current device state: geometry resolved
/// for the active features. Synthetic elements (keyboard keys, caption panel)
/// carry no definition.
struct ResolvedElement {
  const ElementDef* def = nullptr;
  std::string key;
  ElementKind kind = ElementKind::Other;
  std::optional<std::string> text;
  bool clickable = false;
  BoundingBox box;
  bool underline = false;
  bool exposed = true;

  bool has_text() const { return text.has_value() && !text->empty(); }
};

/// Box of `element` under the given features: explicit size override, else
/// text/icon scaling for Scale elements, then Bold Text widening, clamped to
/// the screen.
BoundingBox resolve_box(const ElementDef& element, const AccessibilityFeatureState& feature,
                        int width, int height);

/// Elements visible at `scroll_offset` (fixed elements plus that page), in
/// definition order, with resolved geometry.
std::vector<ResolvedElement> resolve_elements(const ScreenDef& screen,
                                              const AccessibilityFeatureState& feature, int width,
                                              int height, int scroll_offset = 0);

}  // namespace a11y
