#include "rhoraw/ric/pyramid.hpp"

#include "rhoraw/error.hpp"

namespace rhoraw::ric {

Pyramid build_pyramid(const Planes& x) {
  if (x.width <= 0 || x.height <= 0 || x.width % kPlaneMultiple != 0 || x.height % kPlaneMultiple != 0)
    throw DimensionError("pyramid planes must be positive multiples of 16");
  Pyramid p;
  p.levels[kLevels - 1] = x;
  for (int i = kLevels - 1; i > 0; --i) {
    const Planes& hi = p.levels[i];
    Planes lo(hi.width / 2, hi.height / 2);
    for (int c = 0; c < 4; ++c)
      for (int y = 0; y < lo.height; ++y)
        for (int q = 0; q < lo.width; ++q) lo.at(c, q, y) = hi.at(c, 2 * q, 2 * y);
    p.levels[i - 1] = std::move(lo);
  }
  return p;
}

namespace {

int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

int round_up(int v) { return (v + kPlaneMultiple - 1) / kPlaneMultiple * kPlaneMultiple; }

}  // namespace

Planes pad_planes(const Planes& x) {
  const int w = round_up(x.width), h = round_up(x.height);
  if (w == x.width && h == x.height) return x;
  Planes out(w, h);
  for (int c = 0; c < 4; ++c)
    for (int y = 0; y < h; ++y)
      for (int q = 0; q < w; ++q) out.at(c, q, y) = x.at(c, reflect(q, x.width), reflect(y, x.height));
  return out;
}

Planes crop_planes(const Planes& x, int width, int height) {
  if (width > x.width || height > x.height) throw DimensionError("crop larger than source");
  if (width == x.width && height == x.height) return x;
  Planes out(width, height);
  for (int c = 0; c < 4; ++c)
    for (int y = 0; y < height; ++y)
      for (int q = 0; q < width; ++q) out.at(c, q, y) = x.at(c, q, y);
  return out;
}

}  // namespace rhoraw::ric
