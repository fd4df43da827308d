#include "rhoraw/raw.hpp"

#include <algorithm>
#include <cmath>

#include "rhoraw/error.hpp"

namespace rhoraw {

namespace {

void require_even(int w, int h) {
  if (w <= 0 || h <= 0 || w % 2 || h % 2)
    throw DimensionError("mosaic dimensions must be positive and even");
}

// Reflect about the border sample. Preserves the parity of the index, so a
// reflected Bayer site keeps its colour.
inline int mirror(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

template <class T>
PlaneStack<T> stack_impl(const std::vector<T>& samples, int width, int height, CfaPattern pattern) {
  require_even(width, height);
  PlaneStack<T> s(width / 2, height / 2);
  for (int c = 0; c < 4; ++c) {
    const auto [dy, dx] = channel_offset(pattern, BayerChannel(c));
    auto& plane = s.planes[c];
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x)
        plane[std::size_t(y) * s.width + x] = samples[std::size_t(2 * y + dy) * width + 2 * x + dx];
  }
  return s;
}

template <class T>
void unstack_impl(const PlaneStack<T>& s, CfaPattern pattern, std::vector<T>& samples, int width) {
  for (int c = 0; c < 4; ++c) {
    const auto [dy, dx] = channel_offset(pattern, BayerChannel(c));
    const auto& plane = s.planes[c];
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x)
        samples[std::size_t(2 * y + dy) * width + 2 * x + dx] = plane[std::size_t(y) * s.width + x];
  }
}

}  // namespace

NormalizedRaw normalize(const BayerRaw& raw) {
  raw.meta.validate();
  NormalizedRaw out(raw.width, raw.height, raw.meta);
  const double black = raw.meta.black_lev;
  const double span = raw.meta.span();
  for (std::size_t i = 0; i < raw.samples.size(); ++i)
    out.samples[i] = std::clamp((double(raw.samples[i]) - black) / span, 0.0, 1.0);
  return out;
}

BayerRaw denormalize(const NormalizedRaw& x) {
  x.meta.validate();
  BayerRaw out(x.width, x.height, x.meta);
  const double span = x.meta.span();
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    // std::round is half-away-from-zero.
    const double v = std::round(std::clamp(x.samples[i], 0.0, 1.0) * span);
    out.samples[i] = std::uint16_t(long(v) + x.meta.black_lev);
  }
  return out;
}

RgbImage demosaic(const NormalizedRaw& x) {
  require_even(x.width, x.height);
  const int w = x.width, h = x.height;
  RgbImage out(w, h);

  // Colour of every site, computed once.
  std::vector<std::uint8_t> color(std::size_t(w) * h);
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx)
      color[std::size_t(y) * w + xx] = std::uint8_t(color_of(channel_at(x.meta.pattern, y, xx)));

  // Normalised convolution. The green kernel skips diagonals (which are green
  // too); the red/blue kernel uses the full 3x3 tent.
  static constexpr int kGreen[3][3] = {{0, 1, 0}, {1, 4, 1}, {0, 1, 0}};
  static constexpr int kRedBlue[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};

  for (int c = 0; c < 3; ++c) {
    const auto& k = c == int(CfaColor::Green) ? kGreen : kRedBlue;
    auto& plane = out.planes[c];
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        double num = 0.0;
        int den = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          const int yy = mirror(y + dy, h);
          for (int dx = -1; dx <= 1; ++dx) {
            const int wgt = k[dy + 1][dx + 1];
            if (!wgt) continue;
            const int xs = mirror(xx + dx, w);
            const std::size_t idx = std::size_t(yy) * w + xs;
            if (color[idx] != c) continue;
            num += wgt * x.samples[idx];
            den += wgt;
          }
        }
        plane[std::size_t(y) * w + xx] = num / den;
      }
    }
  }
  return out;
}

NormalizedRaw mosaic(const RgbImage& y, const RawMeta& meta) {
  require_even(y.width, y.height);
  NormalizedRaw out(y.width, y.height, meta);
  for (int r = 0; r < y.height; ++r)
    for (int c = 0; c < y.width; ++c)
      out.at(c, r) = y.at(int(color_of(channel_at(meta.pattern, r, c))), c, r);
  return out;
}

PlaneStack<double> stack(const NormalizedRaw& x) {
  return stack_impl(x.samples, x.width, x.height, x.meta.pattern);
}

PlaneStack<std::uint16_t> stack(const BayerRaw& x) {
  return stack_impl(x.samples, x.width, x.height, x.meta.pattern);
}

NormalizedRaw unstack(const PlaneStack<double>& s, const RawMeta& meta) {
  NormalizedRaw out(s.width * 2, s.height * 2, meta);
  unstack_impl(s, meta.pattern, out.samples, out.width);
  return out;
}

BayerRaw unstack(const PlaneStack<std::uint16_t>& s, const RawMeta& meta) {
  BayerRaw out(s.width * 2, s.height * 2, meta);
  unstack_impl(s, meta.pattern, out.samples, out.width);
  return out;
}

}  // namespace rhoraw
