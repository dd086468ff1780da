#include <gtest/gtest.h>

#include "a11y/heuristics.hpp"
#include "a11y/render.hpp"
#include "test_support.hpp"
#include "underline_fixtures.hpp"

namespace a11y {
namespace {

TEST(Layout, BlobsNeverFormAFullWidthStroke) {
  const BoundingBox box{0, 0, 200, 30};
  for (const char* text : {"A", "Hi", "Episode", "Try It Free", "Supercalifragilistic", "a b c d e f g h"}) {
    const auto layout = layout_text(box, text, false, false);
    ASSERT_FALSE(layout.blobs.empty()) << text;
    EXPECT_FALSE(layout.underline);
    for (std::size_t i = 0; i < layout.blobs.size(); ++i) {
      EXPECT_LE(layout.blobs[i].width(), 120) << text;
      if (i > 0) {
        EXPECT_GE(layout.blobs[i].x0 - layout.blobs[i - 1].x1, 6) << text;
      }
    }
  }
}

TEST(Layout, UnderlineSpansFullBoxBelowBlobs) {
  const BoundingBox box{10, 50, 170, 80};
  const auto layout = layout_text(box, "Read more", false, true);
  ASSERT_TRUE(layout.underline);
  EXPECT_EQ(layout.underline->x0, box.x0);
  EXPECT_EQ(layout.underline->x1, box.x1);
  EXPECT_EQ(layout.underline->height(), 2);
  for (const auto& b : layout.blobs) EXPECT_LE(b.y1 + 2, layout.underline->y0);
}

TEST(Layout, BoldThickensBlobs) {
  const BoundingBox box{0, 0, 200, 30};
  const auto plain = layout_text(box, "Bold", false, false);
  const auto bold = layout_text(box, "Bold", true, false);
  ASSERT_EQ(plain.blobs.size(), bold.blobs.size());
  EXPECT_EQ(bold.blobs[0].width(), plain.blobs[0].width() + 1);
  EXPECT_EQ(bold.blobs[0].height(), plain.blobs[0].height() + 1);
}

TEST(Render, DeterministicWhiteBackground) {
  const auto app = testing::mini_app();
  AccessibilityFeatureState f;
  const auto a = render_screen(app.screen("home"), f, 390, 844);
  const auto b = render_screen(app.screen("home"), f, 390, 844);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.channels, 3);
  EXPECT_EQ(a.at(389, 843, 0), 255);
}

TEST(Render, ButtonShapesFillContainers) {
  const auto app = testing::mini_app();
  AccessibilityFeatureState off, on;
  on.button_shapes_on = true;
  const auto a = render_screen(app.screen("home"), off, 390, 844);
  const auto b = render_screen(app.screen("home"), on, 390, 844);
  // A point inside the "Open Details" button but outside its text blobs.
  EXPECT_EQ(a.at(370, 140, 0), 255);
  EXPECT_EQ(b.at(370, 140, 0), kContainerFill.r);
}

TEST(Render, UnderlinedTextRoundTripsThroughDetector) {
  HeuristicConfig cfg;
  int underlined = 0, detected = 0, plain = 0, false_hits = 0;
  for (const auto& f : testing::underline_fixtures()) {
    const bool hit = has_underline(f.pixels, f.box, cfg);
    if (f.underlined) {
      ++underlined;
      detected += hit;
    } else {
      ++plain;
      false_hits += hit;
    }
  }
  EXPECT_EQ(underlined, 25);
  EXPECT_EQ(detected, 25);
  EXPECT_EQ(plain, 25);
  EXPECT_EQ(false_hits, 0);
}

}  // namespace
}  // namespace a11y
