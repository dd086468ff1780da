#pragma once

#include <vector>

#include "a11y/app_model.hpp"
#include "a11y/imaging.hpp"

namespace a11y {

/// Blob geometry for one text element, exposed for tests.
struct TextLayout {
  std::vector<BoundingBox> blobs;
  std::optional<BoundingBox> underline;
};

/// Word-blob layout: each word is split into chunks of at most three
/// characters, each chunk drawn as one dark rectangle. Gaps between blobs
/// are at least 6px and no blob exceeds 60% of the box width, so only an
/// underline forms a full-width horizontal stroke.
TextLayout layout_text(const BoundingBox& box, std::string_view text, bool bold, bool underline);

/// Deterministic RGB raster of resolved elements on a white background.
PixelBuffer render_elements(const std::vector<ResolvedElement>& elements,
                            const AccessibilityFeatureState& feature, int width, int height);

PixelBuffer render_screen(const ScreenDef& screen, const AccessibilityFeatureState& feature, int width,
                          int height, int scroll_offset = 0);

inline constexpr Color kTextColor = Color::gray(30);
inline constexpr Color kContainerFill = Color::gray(225);
inline constexpr int kContainerRadius = 8;

}  // namespace a11y
