#include "a11y/ui_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <numeric>

#include <fmt/format.h>

#include "a11y/text_util.hpp"

namespace a11y {

namespace {

constexpr std::array<std::pair<ElementKind, std::string_view>, 9> kKindNames{{
    {ElementKind::Button, "Button"},
    {ElementKind::Tab, "Tab"},
    {ElementKind::Icon, "Icon"},
    {ElementKind::Toggle, "Toggle"},
    {ElementKind::Text, "Text"},
    {ElementKind::TextField, "TextField"},
    {ElementKind::Image, "Image"},
    {ElementKind::Container, "Container"},
    {ElementKind::Other, "Other"},
}};

constexpr std::array<std::string_view, 5> kSubmitKeys{"return", "search", "go", "done", "send"};

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Doubled vertical center, so band comparisons stay in integers.
int center2(const UIElement& e) { return e.box.y0 + e.box.y1; }

}  // namespace

std::string_view to_string(ElementKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Other";
}

std::optional<ElementKind> parse_element_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

int default_row_band_px(int screen_height) { return std::max(1, screen_height * 4 / 100); }

std::vector<UIElement> sort_reading_order(std::vector<UIElement> elements, int row_band_px) {
  if (elements.empty()) return elements;
  const int band2 = 2 * std::max(row_band_px, 0);

  std::vector<std::size_t> order(elements.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return center2(elements[a]) < center2(elements[b]);
  });

  std::vector<int> band_of(elements.size(), 0);
  int band = 0;
  int anchor = center2(elements[order.front()]);
  for (std::size_t idx : order) {
    if (center2(elements[idx]) - anchor >= band2) {
      ++band;
      anchor = center2(elements[idx]);
    }
    band_of[idx] = band;
  }

  std::vector<std::size_t> result(elements.size());
  std::iota(result.begin(), result.end(), 0);
  std::stable_sort(result.begin(), result.end(), [&](std::size_t a, std::size_t b) {
    if (band_of[a] != band_of[b]) return band_of[a] < band_of[b];
    return elements[a].box.x0 < elements[b].box.x0;
  });

  std::vector<UIElement> out;
  out.reserve(elements.size());
  for (std::size_t idx : result) out.push_back(std::move(elements[idx]));
  return out;
}

void flag_back_button(std::vector<UIElement>& elements, int width, int height) {
  for (auto& e : elements) e.is_back_button = false;
  for (auto& e : elements) {
    const bool kind_ok = e.kind == ElementKind::Button || e.kind == ElementKind::Icon;
    // Entire box inside the top quarter and the left third.
    if (kind_ok && 4 * e.box.y1 <= height && 3 * e.box.x1 <= width) {
      e.is_back_button = true;
      return;
    }
  }
}

void assign_ids(std::vector<UIElement>& elements) {
  for (std::size_t i = 0; i < elements.size(); ++i) elements[i].id = static_cast<int>(i) + 1;
}

void normalize_snapshot(ScreenSnapshot& screen, std::optional<int> row_band_px) {
  const int band = row_band_px.value_or(default_row_band_px(screen.height));
  screen.elements = sort_reading_order(std::move(screen.elements), band);
  flag_back_button(screen.elements, screen.width, screen.height);
  assign_ids(screen.elements);
}

std::string format_element_line(const UIElement& e) {
  std::string line = fmt::format("({}) [{}{}]", e.id, to_string(e.kind), e.clickable ? " (Clickable)" : "");
  if (e.has_text()) line += fmt::format(" \"{}\"", escape_text(*e.text));
  line += fmt::format(" ({}, {}) to ({}, {})", e.box.x0, e.box.y0, e.box.x1, e.box.y1);
  if (e.is_back_button) line += " [Back]";
  return line;
}

std::string serialize_elements(const ScreenSnapshot& screen) {
  std::string out;
  for (std::size_t i = 0; i < screen.elements.size(); ++i) {
    UIElement e = screen.elements[i];
    e.id = static_cast<int>(i) + 1;
    if (i > 0) out.push_back('\n');
    out += format_element_line(e);
  }
  return out;
}

namespace {

class LineCursor {
 public:
  explicit LineCursor(std::string_view s) : s_(s) {}

  bool literal(std::string_view lit) {
    if (s_.substr(pos_, lit.size()) != lit) return false;
    pos_ += lit.size();
    return true;
  }

  bool peek(std::string_view lit) const { return s_.substr(pos_, lit.size()) == lit; }

  std::optional<int> integer() {
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    int value = 0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) return std::nullopt;
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  std::optional<std::string> identifier() {
    const auto start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) return std::nullopt;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::optional<std::string> quoted() {
    if (!literal("\"")) return std::nullopt;
    std::string out;
    while (pos_ < s_.size()) {
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= s_.size()) return std::nullopt;
        const char n = s_[pos_++];
        if (n == 'n') out.push_back('\n');
        else if (n == '"' || n == '\\') out.push_back(n);
        else return std::nullopt;
      } else {
        out.push_back(c);
      }
    }
    return std::nullopt;
  }

  bool done() const { return pos_ == s_.size(); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::optional<UIElement> parse_element_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  LineCursor cur(line);
  UIElement e;
  if (!cur.literal("(")) return std::nullopt;
  auto id = cur.integer();
  if (!id || !cur.literal(") [")) return std::nullopt;
  e.id = *id;
  auto kind_name = cur.identifier();
  if (!kind_name) return std::nullopt;
  auto kind = parse_element_kind(*kind_name);
  if (!kind) return std::nullopt;
  e.kind = *kind;
  e.clickable = cur.literal(" (Clickable)");
  if (!cur.literal("] ")) return std::nullopt;
  if (cur.peek("\"")) {
    auto t = cur.quoted();
    if (!t || !cur.literal(" ")) return std::nullopt;
    e.text = std::move(*t);
  }
  int coords[4];
  const std::string_view seps[4] = {"(", ", ", ") to (", ", "};
  for (int i = 0; i < 4; ++i) {
    if (!cur.literal(seps[i])) return std::nullopt;
    auto v = cur.integer();
    if (!v) return std::nullopt;
    coords[i] = *v;
  }
  if (!cur.literal(")")) return std::nullopt;
  e.box = {coords[0], coords[1], coords[2], coords[3]};
  e.is_back_button = cur.literal(" [Back]");
  if (!cur.done()) return std::nullopt;
  return e;
}

std::vector<UIElement> parse_element_lines(std::string_view text) {
  std::vector<UIElement> out;
  for (const auto& line : text::split(text, '\n')) {
    if (auto e = parse_element_line(line)) out.push_back(std::move(*e));
  }
  return out;
}

KeyboardDetection detect_keyboard(const ScreenSnapshot& screen) {
  auto in_lower_third = [&](const UIElement& e) { return 3 * e.box.y0 >= 2 * screen.height; };
  int single_chars = 0;
  for (const auto& e : screen.elements) {
    if (e.has_text() && text::codepoint_count(*e.text) == 1 && in_lower_third(e)) ++single_chars;
  }
  KeyboardDetection out;
  out.keyboard_visible = single_chars >= kKeyboardMinSingleChars;
  if (!out.keyboard_visible) {
    out.filtered = screen.elements;
    return out;
  }
  for (const auto& e : screen.elements) {
    if (!in_lower_third(e)) {
      out.filtered.push_back(e);
      continue;
    }
    if (e.has_text()) {
      const auto lower = text::to_lower_ascii(text::trim(*e.text));
      if (std::find(kSubmitKeys.begin(), kSubmitKeys.end(), lower) != kSubmitKeys.end()) {
        out.filtered.push_back(e);
      }
    }
  }
  return out;
}

ScreenSnapshot filter_caption_panel(const ScreenSnapshot& screen, double caption_height_frac) {
  ScreenSnapshot out = screen;
  const double band_top = screen.height * (1.0 - caption_height_frac);
  std::erase_if(out.elements, [&](const UIElement& e) {
    return e.box.y0 >= band_top && e.box.y1 <= screen.height;
  });
  return out;
}

}  // namespace a11y
