#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "rhoraw/error.hpp"
#include "rhoraw/losses.hpp"
#include "rhoraw/random.hpp"
#include "rhoraw/synth.hpp"

using namespace rhoraw;
using namespace rhoraw::losses;

namespace {

RgbImage random_rgb(int w, int h, std::uint64_t seed) {
  RgbImage img(w, h);
  Rng rng(seed);
  for (auto& p : img.planes)
    for (auto& v : p) v = rng.uniform();
  return img;
}

YuvImage yuv_const(int n, double y, double u, double v) {
  YuvImage out;
  out.width = n;
  out.height = 1;
  out.y.assign(n, y);
  out.u.assign(n, u);
  out.v.assign(n, v);
  return out;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("cycle loss") {
  const auto a = random_rgb(13, 7, 1);
  CHECK(cycle_loss(a, a) == 0.0);

  auto shifted = a;
  for (auto& p : shifted.planes)
    for (auto& v : p) v += 0.1;
  CHECK(std::abs(cycle_loss(shifted, a) - 0.1) < 1e-9);

  // Direct double loop.
  const auto b = random_rgb(13, 7, 2);
  double ref = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 7; ++y)
      for (int x = 0; x < 13; ++x) ref += std::abs(a.at(c, x, y) - b.at(c, x, y));
  ref /= 3.0 * 13 * 7;
  CHECK(std::abs(cycle_loss(a, b) - ref) < 1e-12);

  CHECK_THROWS_AS(cycle_loss(a, RgbImage(7, 13)), DimensionError);
}

TEST_CASE("cycle loss behaves like a distance") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = random_rgb(6, 5, 3 * s), b = random_rgb(6, 5, 3 * s + 1), c = random_rgb(6, 5, 3 * s + 2);
    const double ab = cycle_loss(a, b), bc = cycle_loss(b, c), ac = cycle_loss(a, c);
    CHECK(ab > 0.0);
    CHECK(ab == cycle_loss(b, a));
    CHECK(ac <= ab + bc + 1e-15);
  }
}

TEST_CASE("yuv conversion") {
  const auto white = to_yuv(synth::constant_rgb(2, 2, 1, 1, 1));
  CHECK(white.y[0] == doctest::Approx(1.0));
  CHECK(std::abs(white.u[0]) < 1e-12);
  CHECK(std::abs(white.v[0]) < 1e-12);
  const auto blue = to_yuv(synth::constant_rgb(1, 1, 0, 0, 1));
  CHECK(blue.u[0] == doctest::Approx(0.5));
  CHECK(blue.y[0] == doctest::Approx(0.114));
  const auto red = to_yuv(synth::constant_rgb(1, 1, 1, 0, 0));
  CHECK(red.v[0] == doctest::Approx(0.5));

  const auto yuv = to_yuv(random_rgb(16, 16, 5));
  for (std::size_t i = 0; i < yuv.y.size(); ++i) {
    CHECK(yuv.y[i] >= 0.0);
    CHECK(yuv.y[i] <= 1.0);
    CHECK(std::abs(yuv.u[i]) <= 0.5 + 1e-12);
    CHECK(std::abs(yuv.v[i]) <= 0.5 + 1e-12);
  }
}

TEST_CASE("var loss") {
  const auto x = yuv_const(10, 0.4, 0.1, -0.05);
  CHECK(var_loss(x, x, 0.0, 0.0, 1.0, 1.0) == 0.0);

  // Constant u shift 0.2, theta gap 2, same luma, phi gap 1.
  const auto shifted = yuv_const(10, 0.4, 0.3, -0.05);
  CHECK(std::abs(var_loss(x, shifted, 0.0, 0.0, 2.0, 1.0) - (-0.1)) < 1e-9);
  CHECK(std::abs(var_loss(x, shifted, 3.0, 1.0, 1.0, 0.0) - (-0.1)) < 1e-9);

  // Doubling the theta gap halves the chroma term.
  const auto both = yuv_const(10, 0.6, 0.3, -0.05);
  const double l1 = var_loss(x, both, 0.0, 0.0, 1.0, 1.0);
  const double l2 = var_loss(x, both, 0.0, 0.0, 2.0, 1.0);
  CHECK(l1 == doctest::Approx(-0.2 - 0.2));
  CHECK(l2 == doctest::Approx(-0.1 - 0.2));

  // More separation, more negative.
  const auto further = yuv_const(10, 0.7, 0.35, -0.05);
  CHECK(var_loss(x, further, 0.0, 0.0, 1.0, 1.0) < l1);

  CHECK_THROWS_AS(var_loss(x, shifted, 1.0, 0.0, 1.0, 1.0), DegeneratePair);
  CHECK_THROWS_AS(var_loss(x, shifted, 0.0, 0.5, 1.0, 0.5), DegeneratePair);
  CHECK_THROWS_AS(var_loss(x, shifted, 0.0, 0.0, 5e-7, 1.0), DegeneratePair);
  CHECK_NOTHROW(var_loss(x, shifted, 0.0, 0.0, 1e-5, 1.0));
}

TEST_CASE("adversarial losses") {
  CHECK(adv_losses(0.3, 1.0).generator == 0.0);
  CHECK(adv_losses(1.0, 0.0).discriminator == 0.0);
  const auto l = adv_losses(0.8, 0.3);
  CHECK(std::abs(l.discriminator - 0.13) < 1e-9);
  CHECK(std::abs(l.generator - 0.49) < 1e-9);
}

TEST_CASE("chroma bins") {
  CHECK(chroma_bin(0.0) == 32);
  CHECK(chroma_bin(-4.0) == 0);
  CHECK(chroma_bin(-100.0) == 0);
  CHECK(chroma_bin(4.0) == 63);
  CHECK(chroma_bin(100.0) == 63);
  CHECK(chroma_bin(0.125) == 33);            // lower edge of bin 33
  CHECK(chroma_bin(std::nextafter(0.125, 0.0)) == 32);
  for (int b = 1; b < kChromaBins; ++b) {
    const double edge = -kChromaRange + b * (2.0 * kChromaRange / kChromaBins);
    CHECK(chroma_bin(edge) == b);
    CHECK(chroma_bin(std::nextafter(edge, -10.0)) == b - 1);
  }
}

TEST_CASE("chroma histogram") {
  const auto gray = chroma_hist(synth::constant_rgb(5, 5, 0.3, 0.3, 0.3));
  CHECK(gray.counted == 25);
  CHECK(gray.at(32, 32) == 1.0);
  CHECK(sum(gray.bins) == 1.0);

  // Two-tone image, half the pixels each.
  RgbImage two(4, 4, 0.0);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      const bool left = x < 2;
      two.at(0, x, y) = left ? 0.5 : 0.2;
      two.at(1, x, y) = 0.4;
      two.at(2, x, y) = left ? 0.1 : 0.6;
    }
  const auto h = chroma_hist(two);
  CHECK(h.at(chroma_bin(std::log(0.5 / 0.4)), chroma_bin(std::log(0.1 / 0.4))) == 0.5);
  CHECK(h.at(chroma_bin(std::log(0.2 / 0.4)), chroma_bin(std::log(0.6 / 0.4))) == 0.5);
  CHECK(std::count_if(h.bins.begin(), h.bins.end(), [](double b) { return b > 0; }) == 2);

  // Ratios do not change when the image is scaled.
  const auto img = synth::smooth_rgb(24, 24, 9, 0.05, 0.45);
  auto doubled = img;
  for (auto& p : doubled.planes)
    for (auto& v : p) v *= 2.0;
  CHECK(chroma_hist(doubled).bins == chroma_hist(img).bins);
  CHECK(std::abs(sum(chroma_hist(img).bins) - 1.0) < 1e-9);

  RgbImage dark(3, 1, 0.2);
  dark.at(1, 0, 0) = 0.0;  // G at zero
  dark.at(0, 1, 0) = 0.0;  // R at zero
  const auto hd = chroma_hist(dark);
  CHECK(hd.excluded == 2);
  CHECK(hd.counted == 1);

  const auto none = chroma_hist(synth::constant_rgb(2, 2, 0, 0, 0));
  CHECK(none.counted == 0);
  CHECK(sum(none.bins) == 0.0);
}

TEST_CASE("gray histogram") {
  const auto h = gray_hist(synth::constant_rgb(6, 6, 0.51, 0.51, 0.51));
  CHECK(h.bins[32] == 1.0);
  CHECK(gray_hist(synth::constant_rgb(1, 1, 1, 1, 1)).bins[63] == 1.0);
  CHECK(gray_hist(synth::constant_rgb(1, 1, 0, 0, 0)).bins[0] == 1.0);
  const auto r = gray_hist(random_rgb(40, 40, 3));
  CHECK(r.counted == 1600);
  CHECK(std::abs(sum(r.bins) - 1.0) < 1e-9);
}
