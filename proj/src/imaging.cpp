#include "a11y/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

#include "a11y/errors.hpp"

namespace a11y {

namespace {

using boost::multiprecision::int256_t;

constexpr int kGauss[5][5] = {
    {2, 4, 5, 4, 2}, {4, 9, 12, 9, 4}, {5, 12, 15, 12, 5}, {4, 9, 12, 9, 4}, {2, 4, 5, 4, 2},
};
constexpr long long kGaussSum = 159;
// Sobel on the unnormalized blur output; divide by this to reach 0-255 scale.
constexpr double kGradientScale = 4.0 * kGaussSum;

int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

PixelBuffer::PixelBuffer(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill) {}

std::size_t EdgeMap::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

PixelBuffer to_grayscale(const PixelBuffer& buf) {
  if (buf.channels == 1) return buf;
  PixelBuffer out(buf.width, buf.height, 1);
  for (int y = 0; y < buf.height; ++y) {
    for (int x = 0; x < buf.width; ++x) {
      out.at(x, y) = luma(buf.at(x, y, 0), buf.at(x, y, 1), buf.at(x, y, 2));
    }
  }
  return out;
}

PixelBuffer to_rgb(const PixelBuffer& buf) {
  if (buf.channels == 3) return buf;
  PixelBuffer out(buf.width, buf.height, 3);
  for (std::size_t i = 0; i < buf.data.size(); ++i) {
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = buf.data[i];
  }
  return out;
}

Histogram histogram(const PixelBuffer& gray) {
  Histogram h{};
  for (auto v : gray.data) ++h[v];
  return h;
}

int otsu_threshold(const Histogram& hist) {
  std::uint64_t n = 0;
  std::uint64_t total_sum = 0;
  for (int v = 0; v < 256; ++v) {
    n += hist[v];
    total_sum += hist[v] * static_cast<std::uint64_t>(v);
  }
  int best = -1;
  // Between-class variance (scaled by N^2) is d^2 / (c0 * c1) with
  // d = N*s0 - c0*S; compared by cross-multiplication to stay exact.
  int256_t best_num = 0;
  int256_t best_den = 1;
  std::uint64_t c0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 0; t < 255; ++t) {
    c0 += hist[t];
    s0 += hist[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t c1 = n - c0;
    if (c0 == 0 || c1 == 0) continue;
    const int256_t d = int256_t(n) * s0 - int256_t(c0) * total_sum;
    const int256_t num = d * d;
    const int256_t den = int256_t(c0) * c1;
    if (best < 0 || num * best_den > best_num * den) {
      best = t;
      best_num = num;
      best_den = den;
    }
  }
  if (best >= 0) return best;
  for (int v = 0; v < 256; ++v) {
    if (hist[v] != 0) return v;
  }
  return 0;
}

int otsu_threshold(const PixelBuffer& gray) { return otsu_threshold(histogram(to_grayscale(gray))); }

PixelBuffer binarize(const PixelBuffer& gray, int threshold) {
  PixelBuffer out(gray.width, gray.height, 1);
  for (std::size_t i = 0; i < gray.data.size(); ++i) out.data[i] = gray.data[i] > threshold ? 255 : 0;
  return out;
}

EdgeMap canny_edges(const PixelBuffer& input, double low, double high) {
  const PixelBuffer gray = to_grayscale(input);
  const int w = gray.width;
  const int h = gray.height;
  EdgeMap edges{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0)};
  if (w == 0 || h == 0) return edges;
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };

  std::vector<long long> blur(edges.bits.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      long long acc = 0;
      for (int ky = -2; ky <= 2; ++ky) {
        for (int kx = -2; kx <= 2; ++kx) {
          acc += kGauss[ky + 2][kx + 2] * gray.at(clampi(x + kx, 0, w - 1), clampi(y + ky, 0, h - 1));
        }
      }
      blur[idx(x, y)] = acc;
    }
  }

  std::vector<long long> gx(blur.size()), gy(blur.size()), mag2(blur.size());
  auto b = [&](int x, int y) { return blur[idx(clampi(x, 0, w - 1), clampi(y, 0, h - 1))]; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const long long sx = (b(x + 1, y - 1) + 2 * b(x + 1, y) + b(x + 1, y + 1)) -
                           (b(x - 1, y - 1) + 2 * b(x - 1, y) + b(x - 1, y + 1));
      const long long sy = (b(x - 1, y + 1) + 2 * b(x, y + 1) + b(x + 1, y + 1)) -
                           (b(x - 1, y - 1) + 2 * b(x, y - 1) + b(x + 1, y - 1));
      gx[idx(x, y)] = sx;
      gy[idx(x, y)] = sy;
      mag2[idx(x, y)] = sx * sx + sy * sy;
    }
  }

  auto m = [&](int x, int y) -> long long {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0;
    return mag2[idx(x, y)];
  };
  // 0 = none, 1 = weak, 2 = strong
  std::vector<std::uint8_t> cls(blur.size(), 0);
  const double low2 = (low * kGradientScale) * (low * kGradientScale);
  const double high2 = (high * kGradientScale) * (high * kGradientScale);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const long long g = mag2[idx(x, y)];
      if (g == 0) continue;
      const long long ax = std::llabs(gx[idx(x, y)]);
      const long long ay = std::llabs(gy[idx(x, y)]);
      int dx = 0;
      int dy = 0;
      if (10000 * ay <= 4142 * ax) {
        dx = 1;
      } else if (10000 * ay >= 24142 * ax) {
        dy = 1;
      } else {
        const bool same_sign = (gx[idx(x, y)] > 0) == (gy[idx(x, y)] > 0);
        dx = 1;
        dy = same_sign ? 1 : -1;
      }
      // Strict against the neighbour before, inclusive after: plateaus keep one pixel.
      if (!(g > m(x - dx, y - dy) && g >= m(x + dx, y + dy))) continue;
      const auto gd = static_cast<double>(g);
      if (gd >= high2) cls[idx(x, y)] = 2;
      else if (gd >= low2) cls[idx(x, y)] = 1;
    }
  }

  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (cls[idx(x, y)] == 2) {
        edges.bits[idx(x, y)] = 1;
        queue.emplace_back(x, y);
      }
    }
  }
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int ny = y - 1; ny <= y + 1; ++ny) {
      for (int nx = x - 1; nx <= x + 1; ++nx) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        if (cls[idx(nx, ny)] == 1 && !edges.bits[idx(nx, ny)]) {
          edges.bits[idx(nx, ny)] = 1;
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  return edges;
}

std::vector<HorizontalLine> hough_horizontal_lines(const EdgeMap& edges, double min_width_frac,
                                                   int max_gap) {
  std::vector<HorizontalLine> lines;
  const double needed = min_width_frac * edges.width;
  for (int y = 0; y < edges.height; ++y) {
    HorizontalLine best{y, 0, 0};
    int run_start = -1;
    int last = -1;
    for (int x = 0; x < edges.width; ++x) {
      if (!edges.at(x, y)) continue;
      if (run_start < 0 || x - last - 1 > max_gap) run_start = x;
      last = x;
      if (last - run_start + 1 > best.span_width) best = {y, run_start, last - run_start + 1};
    }
    if (best.span_width > 0 && best.span_width + 1e-9 >= needed) lines.push_back(best);
  }
  return lines;
}

PixelBuffer extract_patch(const PixelBuffer& buf, const BoundingBox& box) {
  const int x0 = clampi(box.x0, 0, buf.width);
  const int y0 = clampi(box.y0, 0, buf.height);
  const int x1 = clampi(box.x1, 0, buf.width);
  const int y1 = clampi(box.y1, 0, buf.height);
  if (x1 <= x0 || y1 <= y0) {
    throw PatchError(fmt::format("empty patch for box ({}, {}) to ({}, {})", box.x0, box.y0, box.x1, box.y1));
  }
  PixelBuffer out(x1 - x0, y1 - y0, buf.channels);
  const auto row_bytes = static_cast<std::size_t>(out.width) * static_cast<std::size_t>(buf.channels);
  for (int y = y0; y < y1; ++y) {
    std::copy_n(buf.data.begin() + static_cast<std::ptrdiff_t>(buf.index(x0, y)), row_bytes,
                out.data.begin() + static_cast<std::ptrdiff_t>(out.index(0, y - y0)));
  }
  return out;
}

void set_pixel(PixelBuffer& buf, int x, int y, Color color) {
  if (x < 0 || y < 0 || x >= buf.width || y >= buf.height) return;
  if (buf.channels == 1) {
    buf.at(x, y) = luma(color.r, color.g, color.b);
  } else {
    buf.at(x, y, 0) = color.r;
    buf.at(x, y, 1) = color.g;
    buf.at(x, y, 2) = color.b;
  }
}

void fill_rect(PixelBuffer& buf, const BoundingBox& box, Color color) {
  const int x0 = clampi(box.x0, 0, buf.width);
  const int x1 = clampi(box.x1, 0, buf.width);
  const int y0 = clampi(box.y0, 0, buf.height);
  const int y1 = clampi(box.y1, 0, buf.height);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) set_pixel(buf, x, y, color);
  }
}

void stroke_rect(PixelBuffer& buf, const BoundingBox& box, Color color, int thickness) {
  const int t = std::max(1, thickness);
  fill_rect(buf, {box.x0, box.y0, box.x1, box.y0 + t}, color);
  fill_rect(buf, {box.x0, box.y1 - t, box.x1, box.y1}, color);
  fill_rect(buf, {box.x0, box.y0, box.x0 + t, box.y1}, color);
  fill_rect(buf, {box.x1 - t, box.y0, box.x1, box.y1}, color);
}

void fill_rounded_rect(PixelBuffer& buf, const BoundingBox& box, int radius, Color color) {
  const int r = std::max(0, std::min({radius, box.width() / 2, box.height() / 2}));
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) {
      // Distance from the nearest corner circle center, in doubled coordinates.
      const int cx = x < box.x0 + r ? box.x0 + r : (x >= box.x1 - r ? box.x1 - r - 1 : x);
      const int cy = y < box.y0 + r ? box.y0 + r : (y >= box.y1 - r ? box.y1 - r - 1 : y);
      const int dx = x - cx;
      const int dy = y - cy;
      if (dx * dx + dy * dy <= r * r) set_pixel(buf, x, y, color);
    }
  }
}

void draw_line(PixelBuffer& buf, int x0, int y0, int x1, int y1, Color color, int thickness) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  const int half = std::max(1, thickness) / 2;
  int err = dx + dy;
  while (true) {
    for (int oy = -half; oy <= half; ++oy) {
      for (int ox = -half; ox <= half; ++ox) set_pixel(buf, x0 + ox, y0 + oy, color);
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace a11y
