#include "a11y/render.hpp"

#include <algorithm>

#include "a11y/device.hpp"
#include "a11y/text_util.hpp"

namespace a11y {

namespace {

constexpr int kBlobGap = 6;
constexpr int kChunkChars = 3;
constexpr double kMaxBlobFrac = 0.6;

std::vector<int> chunk_lengths(std::string_view text) {
  std::vector<int> out;
  for (const auto& word : text::split_words(text)) {
    int n = static_cast<int>(text::codepoint_count(word));
    while (n > 0) {
      out.push_back(std::min(n, kChunkChars));
      n -= kChunkChars;
    }
  }
  return out;
}

void draw_text(PixelBuffer& buf, const ResolvedElement& e, const AccessibilityFeatureState& feature,
               Color color) {
  const bool underline = feature.button_shapes_on && e.underline;
  const auto layout = layout_text(e.box, e.text.value_or(""), feature.bold_text_on, underline);
  for (const auto& blob : layout.blobs) fill_rect(buf, blob, color);
  if (layout.underline) fill_rect(buf, *layout.underline, color);
}

}  // namespace

TextLayout layout_text(const BoundingBox& box, std::string_view text, bool bold, bool underline) {
  TextLayout layout;
  if (underline) layout.underline = BoundingBox{box.x0, box.y1 - 5, box.x1, box.y1 - 3};
  const auto chunks = chunk_lengths(text);
  if (chunks.empty() || box.width() < 4 || box.height() < 4) return layout;

  const int y0 = box.y0 + 2;
  const int y1 = std::max(y0 + 1, box.y1 - 7);
  const int left = box.x0 + 2;
  const int avail = box.width() - 4;
  const int max_blob = std::max(1, static_cast<int>(kMaxBlobFrac * box.width()));
  int total = 0;
  for (int n : chunks) total += n;

  int cumulative = 0;
  for (int n : chunks) {
    const int start = left + avail * cumulative / total;
    cumulative += n;
    const int end = left + avail * cumulative / total;
    const int width = std::clamp(end - start - kBlobGap, 1, max_blob);
    BoundingBox blob{start, y0, start + width, y1};
    if (bold) {
      blob.x1 += 1;
      blob.y0 -= 1;
    }
    layout.blobs.push_back(blob);
  }
  return layout;
}

PixelBuffer render_elements(const std::vector<ResolvedElement>& elements,
                            const AccessibilityFeatureState& feature, int width, int height) {
  PixelBuffer buf(width, height, 3, 255);
  std::vector<const ResolvedElement*> order;
  for (const auto& e : elements) order.push_back(&e);
  // Larger boxes first so contained labels paint over their containers.
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->box.area() > b->box.area(); });

  for (const auto* e : order) {
    if (e->key == kCaptionPanelKey) {
      fill_rounded_rect(buf, e->box, kContainerRadius, Color::gray(40));
      draw_text(buf, *e, {}, Color::gray(240));
      continue;
    }
    if (e->key.starts_with(kKeyboardKeyPrefix)) {
      fill_rounded_rect(buf, e->box, 4, Color::gray(205));
      draw_text(buf, *e, {}, kTextColor);
      continue;
    }
    switch (e->kind) {
      case ElementKind::Button:
      case ElementKind::Tab:
        if (feature.button_shapes_on) fill_rounded_rect(buf, e->box, kContainerRadius, kContainerFill);
        draw_text(buf, *e, feature, kTextColor);
        break;
      case ElementKind::Icon:
        fill_rect(buf, {e->box.x0 + 2, e->box.y0 + 2, e->box.x1 - 2, e->box.y1 - 2}, Color::gray(90));
        break;
      case ElementKind::Image:
        fill_rect(buf, e->box, Color::gray(160));
        break;
      case ElementKind::Toggle:
        fill_rounded_rect(buf, e->box, e->box.height() / 2, Color::gray(140));
        break;
      case ElementKind::TextField:
        stroke_rect(buf, e->box, Color::gray(150));
        draw_text(buf, *e, feature, Color::gray(110));
        break;
      case ElementKind::Text:
      case ElementKind::Other:
        draw_text(buf, *e, feature, kTextColor);
        break;
      case ElementKind::Container:
        break;
    }
  }
  return buf;
}

PixelBuffer render_screen(const ScreenDef& screen, const AccessibilityFeatureState& feature, int width,
                          int height, int scroll_offset) {
  return render_elements(resolve_elements(screen, feature, width, height, scroll_offset), feature, width,
                         height);
}

}  // namespace a11y
