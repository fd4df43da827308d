#include "rhoraw/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rhoraw/inverse_isp.hpp"
#include "rhoraw/raw.hpp"
#include "rhoraw/random.hpp"
#include "rhoraw/stats.hpp"

namespace rhoraw::synth {

namespace {

struct Wave {
  double fx, fy, phase, amp;
};

struct Blob {
  double cx, cy, radius, amp;
};

// Raw field in roughly [-1, 1], smooth at the scale of the image.
std::vector<double> smooth_field(int w, int h, Rng& rng) {
  std::vector<Wave> waves(4);
  for (auto& wv : waves)
    wv = {rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0), rng.uniform(0.0, 2.0 * std::numbers::pi),
          rng.uniform(0.1, 0.3)};
  std::vector<Blob> blobs(3);
  for (auto& b : blobs) b = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.1, 0.3), rng.uniform(-0.4, 0.4)};
  const double gx = rng.uniform(-0.3, 0.3), gy = rng.uniform(-0.3, 0.3);
  std::vector<double> f(std::size_t(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double u = (x + 0.5) / w, v = (y + 0.5) / h;
      double s = gx * (u - 0.5) + gy * (v - 0.5);
      for (const auto& wv : waves)
        s += wv.amp * std::sin(2.0 * std::numbers::pi * (wv.fx * u + wv.fy * v) + wv.phase);
      for (const auto& b : blobs) {
        const double d2 = (u - b.cx) * (u - b.cx) + (v - b.cy) * (v - b.cy);
        s += b.amp * std::exp(-d2 / (2.0 * b.radius * b.radius));
      }
      f[std::size_t(y) * w + x] = s;
    }
  return f;
}

void rescale(std::vector<double>& f, double lo, double hi) {
  const auto [mn, mx] = std::minmax_element(f.begin(), f.end());
  const double a = *mn, b = *mx;
  for (double& v : f) v = b > a ? lo + (hi - lo) * (v - a) / (b - a) : 0.5 * (lo + hi);
}

}  // namespace

RgbImage smooth_rgb(int width, int height, std::uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  RgbImage img(width, height);
  const auto base = smooth_field(width, height, rng);
  for (int c = 0; c < 3; ++c) {
    auto tint = smooth_field(width, height, rng);
    for (std::size_t i = 0; i < tint.size(); ++i) tint[i] = base[i] + 0.35 * tint[i];
    const double span = hi - lo;
    const double clo = lo + rng.uniform(0.0, 0.2) * span;
    const double chi = hi - rng.uniform(0.0, 0.2) * span;
    rescale(tint, clo, chi);
    img.planes[c] = std::move(tint);
  }
  return img;
}

RgbImage gradient_rgb(int width, int height, double lo, double hi) {
  RgbImage img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double u = width > 1 ? double(x) / (width - 1) : 0.0;
      const double v = height > 1 ? double(y) / (height - 1) : 0.0;
      img.at(0, x, y) = lo + (hi - lo) * u;
      img.at(1, x, y) = lo + (hi - lo) * 0.5 * (u + v);
      img.at(2, x, y) = lo + (hi - lo) * v;
    }
  return img;
}

RgbImage constant_rgb(int width, int height, double r, double g, double b) {
  RgbImage img(width, height);
  std::fill(img.planes[0].begin(), img.planes[0].end(), r);
  std::fill(img.planes[1].begin(), img.planes[1].end(), g);
  std::fill(img.planes[2].begin(), img.planes[2].end(), b);
  return img;
}

BayerRaw smooth_raw(int width, int height, const RawMeta& meta, std::uint64_t seed, double noise) {
  meta.validate();
  Rng rng(seed);
  auto f = smooth_field(width, height, rng);
  rescale(f, 0.05, 0.9);
  const double gain[4] = {rng.uniform(0.5, 0.9), 1.0, 1.0, rng.uniform(0.4, 0.8)};
  BayerRaw raw(width, height, meta);
  const double span = meta.span();
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int c = int(channel_at(meta.pattern, y, x));
      double v = meta.black_lev + span * f[std::size_t(y) * width + x] * gain[c] + noise * rng.normal();
      v = std::clamp(std::round(v), double(meta.black_lev), double(meta.saturation_lev));
      raw.at(x, y) = std::uint16_t(v);
    }
  return raw;
}

BayerRaw noise_raw(int width, int height, const RawMeta& meta, std::uint64_t seed) {
  meta.validate();
  Rng rng(seed);
  BayerRaw raw(width, height, meta);
  const std::uint64_t n = std::uint64_t(meta.span()) + 1;
  for (auto& s : raw.samples) s = std::uint16_t(meta.black_lev + rng.next() % n);
  return raw;
}

BayerRaw constant_raw(int width, int height, const RawMeta& meta, std::uint16_t value) {
  meta.validate();
  BayerRaw raw(width, height, meta);
  std::fill(raw.samples.begin(), raw.samples.end(), value);
  return raw;
}

BayerRaw natural_raw(int width, int height, const RawMeta& meta, std::uint64_t seed) {
  Rng rng(stream_seed(seed, 1));
  invisp::InvIspParams p = invisp::InvIspParams::defaults();
  p.raw = meta;
  const double theta = rng.normal(), phi = rng.normal();
  return invisp::inv_isp_raw(smooth_rgb(width, height, seed), p, theta, phi);
}

NormalizedRaw kquad_raw(int width, int height, double k, std::uint64_t seed, int patch, double pixel_sigma) {
  const int px = (width + patch - 1) / patch, py = (height + patch - 1) / patch;
  const auto means = stats::sample_kquad(k, std::size_t(px) * py, seed);
  Rng rng(stream_seed(seed, 7));
  NormalizedRaw x(width, height, RawMeta{});
  for (int y = 0; y < height; ++y)
    for (int xx = 0; xx < width; ++xx) {
      const double mu = means[std::size_t(y / patch) * px + xx / patch];
      x.at(xx, y) = std::clamp(mu + pixel_sigma * rng.normal(), 0.0, 1.0);
    }
  return x;
}

}  // namespace rhoraw::synth
