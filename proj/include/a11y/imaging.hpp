#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "a11y/ui_model.hpp"

namespace a11y {

/// Row-major 8-bit image, 1 (gray) or 3 (RGB) interleaved channels.
struct PixelBuffer {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  PixelBuffer() = default;
  PixelBuffer(int w, int h, int c, std::uint8_t fill = 0);

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
  }
  std::uint8_t at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }

  friend bool operator==(const PixelBuffer&, const PixelBuffer&) = default;
};

struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1

  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] != 0;
  }
  std::size_t count() const;
};

struct Color {
  std::uint8_t r = 0, g = 0, b = 0;
  static constexpr Color gray(std::uint8_t v) { return {v, v, v}; }
  friend bool operator==(const Color&, const Color&) = default;
};

/// Integer BT.601 luma, rounded: (299R + 587G + 114B + 500) / 1000.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

PixelBuffer to_grayscale(const PixelBuffer& buf);
PixelBuffer to_rgb(const PixelBuffer& buf);

using Histogram = std::array<std::uint64_t, 256>;
Histogram histogram(const PixelBuffer& gray);

/// Threshold t maximizing between-class variance, classes {v <= t} and
/// {v > t}; smallest t on ties. A constant image returns its value.
int otsu_threshold(const Histogram& hist);
int otsu_threshold(const PixelBuffer& gray);

/// 255 where value > threshold, else 0.
PixelBuffer binarize(const PixelBuffer& gray, int threshold);

struct CannyParams {
  double low = 40.0;
  double high = 100.0;
};

/// Gaussian 5x5 (sigma 1.4) -> Sobel -> non-maximum suppression ->
/// double threshold -> 8-connected hysteresis. Thresholds are on the
/// 0-255 gradient scale.
EdgeMap canny_edges(const PixelBuffer& gray, double low = 40.0, double high = 100.0);

struct HorizontalLine {
  int row = 0;
  int x_start = 0;
  int span_width = 0;
  friend bool operator==(const HorizontalLine&, const HorizontalLine&) = default;
};

/// Per row, the longest edge run tolerating gaps of up to `max_gap` pixels;
/// rows whose span reaches min_width_frac * width are returned.
std::vector<HorizontalLine> hough_horizontal_lines(const EdgeMap& edges, double min_width_frac,
                                                   int max_gap = 1);

/// Copy of the region `box`, clamped to the buffer. Throws PatchError when
/// the clamped region is empty.
PixelBuffer extract_patch(const PixelBuffer& buf, const BoundingBox& box);

// Drawing primitives. Coordinates outside the buffer are clipped.
void fill_rect(PixelBuffer& buf, const BoundingBox& box, Color color);
void stroke_rect(PixelBuffer& buf, const BoundingBox& box, Color color, int thickness = 1);
void fill_rounded_rect(PixelBuffer& buf, const BoundingBox& box, int radius, Color color);
void set_pixel(PixelBuffer& buf, int x, int y, Color color);
void draw_line(PixelBuffer& buf, int x0, int y0, int x1, int y1, Color color, int thickness = 1);

// Lossless PNG import/export (libpng). Gray and RGB buffers are supported.
void write_png(const std::filesystem::path& path, const PixelBuffer& buf);
PixelBuffer read_png(const std::filesystem::path& path);

}  // namespace a11y
