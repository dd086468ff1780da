#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace a11y {

/// Axis-aligned pixel box, origin top-left, half-open: [x0, x1) x [y0, y1).
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool valid() const { return x0 >= 0 && y0 >= 0 && x0 <= x1 && y0 <= y1; }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool contains(const BoundingBox& o) const {
    return o.x0 >= x0 && o.y0 >= y0 && o.x1 <= x1 && o.y1 <= y1;
  }
  int center_x() const { return (x0 + x1) / 2; }
  int center_y() const { return (y0 + y1) / 2; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class ElementKind { Button, Tab, Icon, Toggle, Text, TextField, Image, Container, Other };

std::string_view to_string(ElementKind kind);
std::optional<ElementKind> parse_element_kind(std::string_view name);

struct UIElement {
  int id = 0;
  ElementKind kind = ElementKind::Other;
  std::optional<std::string> text;
  bool clickable = false;
  BoundingBox box;
  bool is_back_button = false;

  bool has_text() const { return text.has_value() && !text->empty(); }

  friend bool operator==(const UIElement&, const UIElement&) = default;
};

struct ScreenSnapshot {
  std::vector<UIElement> elements;
  int width = 0;
  int height = 0;
  bool keyboard_visible = false;
  std::string app_id;
  std::string screen_id;

  friend bool operator==(const ScreenSnapshot&, const ScreenSnapshot&) = default;
};

/// Reading-order grouping granularity used when none is given: 4% of screen height.
int default_row_band_px(int screen_height);

/// Groups elements into horizontal bands (vertical centers closer than
/// `row_band_px` to the band's first element), bands top-to-bottom, then x0
/// left-to-right inside a band. Stable for ties.
std::vector<UIElement> sort_reading_order(std::vector<UIElement> elements, int row_band_px);

/// Marks at most one element as the top-left back button: the first Button or
/// Icon in reading order whose box lies inside the top quarter and left third.
void flag_back_button(std::vector<UIElement>& elements, int width, int height);

/// Sorts into reading order, flags the back button and renumbers ids from 1.
void normalize_snapshot(ScreenSnapshot& screen, std::optional<int> row_band_px = std::nullopt);

/// Renumbers ids to list positions starting at 1.
void assign_ids(std::vector<UIElement>& elements);

/// One element in the agent-facing line format, using the element's own id.
std::string format_element_line(const UIElement& element);

/// Plain-text listing fed to the agents: one line per element, ids are list
/// positions starting at 1. Lines are joined by '\n' with no trailing newline.
std::string serialize_elements(const ScreenSnapshot& screen);

/// Inverse of format_element_line. Returns nullopt for lines outside the grammar.
std::optional<UIElement> parse_element_line(std::string_view line);

/// Parses every element line found in a block of text; other lines are skipped.
std::vector<UIElement> parse_element_lines(std::string_view text);

struct KeyboardDetection {
  bool keyboard_visible = false;
  std::vector<UIElement> filtered;
};

inline constexpr int kKeyboardMinSingleChars = 10;

/// Keyboard present iff at least 10 single-character text elements start in
/// the lower third. When present, lower-third elements are dropped except the
/// submit key (return/search/go/done/send).
KeyboardDetection detect_keyboard(const ScreenSnapshot& screen);

inline constexpr double kDefaultCaptionHeightFrac = 0.22;

/// Removes elements lying entirely inside the bottom caption band.
ScreenSnapshot filter_caption_panel(const ScreenSnapshot& screen,
                                    double caption_height_frac = kDefaultCaptionHeightFrac);

}  // namespace a11y
