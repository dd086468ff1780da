#pragma once

#include <random>
#include <string>
#include <vector>

#include "a11y/render.hpp"

namespace a11y::testing {

struct UnderlineFixture {
  PixelBuffer pixels;
  BoundingBox box;
  bool underlined = false;
};

// Single clickable text element rendered with Button Shapes on. Half the
// fixtures carry the underline flag; text, width, height and bold vary.
inline std::vector<UnderlineFixture> underline_fixtures(int count = 50, unsigned seed = 99) {
  static const char* kWords[] = {"Sign", "in", "Read", "more", "Terms", "of", "Service", "Help",
                                 "Try", "It", "Free", "Privacy", "Policy", "Learn", "Go", "OK"};
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> words(1, 4), pick(0, 15), width(60, 340), height(18, 44);
  std::bernoulli_distribution bold(0.3);
  std::vector<UnderlineFixture> out;
  for (int i = 0; i < count; ++i) {
    std::string text;
    for (int w = words(rng); w > 0; --w) text += std::string(text.empty() ? "" : " ") + kWords[pick(rng)];
    ResolvedElement e;
    e.key = "label";
    e.kind = ElementKind::Text;
    e.text = text;
    e.clickable = true;
    e.box = {20, 100, 20 + width(rng), 100 + height(rng)};
    e.underline = i % 2 == 0;
    AccessibilityFeatureState f;
    f.button_shapes_on = true;
    f.bold_text_on = bold(rng);
    out.push_back({render_elements({e}, f, 390, 300), e.box, e.underline});
  }
  return out;
}

}  // namespace a11y::testing
