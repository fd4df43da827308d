#include "rhoraw/isp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rhoraw/error.hpp"
#include "rhoraw/raw.hpp"

namespace rhoraw::isp {

namespace {

constexpr double kSimplexTol = 1e-9;

void check_simplex(const std::vector<double>& w, std::size_t n, const char* what) {
  if (w.size() != n)
    throw InvalidParams(std::string(what) + ": expected " + std::to_string(n) + " weights");
  double sum = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < -kSimplexTol) throw InvalidParams(std::string(what) + ": negative weight");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTol) throw InvalidParams(std::string(what) + ": weights must sum to 1");
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

template <class Fn>
RgbImage map_pixels(const RgbImage& y, Fn&& fn) {
  RgbImage out(y.width, y.height);
  for (std::size_t i = 0; i < y.pixel_count(); ++i) {
    const std::array<double, 3> px{y.planes[0][i], y.planes[1][i], y.planes[2][i]};
    const auto o = fn(px);
    for (int c = 0; c < 3; ++c) out.planes[c][i] = o[c];
  }
  return out;
}

std::array<double, 3> channel_means(const RgbImage& y) {
  std::array<double, 3> m{};
  const double n = double(y.pixel_count());
  for (int c = 0; c < 3; ++c) {
    double s = 0.0;
    for (double v : y.planes[c]) s += v;
    m[c] = s / n;
  }
  return m;
}

double mean_luma(const RgbImage& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.pixel_count(); ++i)
    s += luma601(y.planes[0][i], y.planes[1][i], y.planes[2][i]);
  return s / double(y.pixel_count());
}

}  // namespace

void AwbPresets::validate() const {
  if (presets.empty()) throw InvalidParams("AWB presets: at least one preset required");
  if (presets.size() > 16) throw InvalidParams("AWB presets: at most 16 presets");
  for (const auto& p : presets)
    if (!(p.r > 0.25 && p.r < 4.0 && p.b > 0.25 && p.b < 4.0))
      throw InvalidParams("AWB presets: gains must lie in (0.25, 4)");
}

void CcmPresets::validate() const {
  for (const Eigen::Matrix3d* m : {&day, &night}) {
    if (!m->allFinite()) throw InvalidParams("CCM preset has non-finite entries");
    for (int r = 0; r < 3; ++r)
      if (std::abs(m->row(r).sum() - 1.0) > 1e-6) throw InvalidParams("CCM preset rows must sum to 1");
    if (std::abs(m->determinant()) <= 1e-6) throw InvalidParams("CCM preset is singular");
  }
}

void IspParams::validate() const {
  awb.validate();
  check_simplex(awb_weights, awb.presets.size(), "AWB weights");
  ccm.validate();
  if (!(brightness.alpha > 0.0 && brightness.alpha < 1.0))
    throw InvalidParams("brightness alpha must lie in (0,1)");
  if (!(brightness.beta > brightness.alpha)) throw InvalidParams("brightness beta must exceed alpha");
  if (!std::isfinite(brightness.raw_gain)) throw InvalidParams("brightness raw_gain must be finite");
  check_simplex({omega_day, omega_night}, 2, "CCM weights");
}

IspParams IspParams::defaults() {
  IspParams p;
  p.awb.presets = {{2.2, 1.4}, {1.9, 1.6}, {1.6, 1.9}, {1.3, 2.4}};
  p.awb_weights.assign(p.awb.presets.size(), 1.0 / double(p.awb.presets.size()));
  p.ccm.day << 1.6, -0.4, -0.2,  //
      -0.3, 1.5, -0.2,           //
      0.0, -0.5, 1.5;
  p.ccm.night << 1.3, -0.2, -0.1,  //
      -0.2, 1.3, -0.1,             //
      0.0, -0.3, 1.3;
  return p;
}

IspParams IspParams::identity() {
  IspParams p;
  p.awb.presets = {{1.0, 1.0}};
  p.awb_weights = {1.0};
  return p;
}

std::array<double, 3> highlight_preserving_gain(const std::array<double, 3>& px,
                                                const std::array<double, 3>& gains) {
  const double p = luma601(px[0], px[1], px[2]);
  const double t = std::max(p - kHighlightKnee, 0.0) / (1.0 - kHighlightKnee);
  const double a = t * t;
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double g = gains[c];
    out[c] = px[c] * (a * std::max(g, 1.0) + (1.0 - a) * g);
  }
  return out;
}

GainPreset awb_gains(const AwbPresets& presets, const std::vector<double>& weights) {
  presets.validate();
  check_simplex(weights, presets.presets.size(), "AWB weights");
  GainPreset g{0.0, 0.0};
  for (std::size_t i = 0; i < weights.size(); ++i) {
    g.r += weights[i] * presets.presets[i].r;
    g.b += weights[i] * presets.presets[i].b;
  }
  return g;
}

RgbImage awb_apply(const RgbImage& y, const AwbPresets& presets, const std::vector<double>& weights) {
  const auto g = awb_gains(presets, weights);
  const std::array<double, 3> gains{g.r, 1.0, g.b};
  return map_pixels(y, [&](const std::array<double, 3>& px) {
    auto o = highlight_preserving_gain(px, gains);
    for (auto& v : o) v = clamp01(v);
    return o;
  });
}

std::vector<double> project_to_hull(const AwbPresets& presets, GainPreset target) {
  presets.validate();
  const auto& P = presets.presets;
  const std::size_t n = P.size();
  std::vector<double> best(n, 0.0);
  double best_d2 = std::numeric_limits<double>::infinity();
  auto consider = [&](double d2, std::initializer_list<std::pair<std::size_t, double>> w) {
    // Strict improvement keeps the earliest (sparsest) candidate on ties.
    if (d2 < best_d2 - 1e-18) {
      best_d2 = d2;
      std::fill(best.begin(), best.end(), 0.0);
      for (auto [i, v] : w) best[i] += v;
    }
  };
  auto dist2 = [&](double r, double b) {
    return (r - target.r) * (r - target.r) + (b - target.b) * (b - target.b);
  };

  for (std::size_t i = 0; i < n; ++i) consider(dist2(P[i].r, P[i].b), {{i, 1.0}});

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double er = P[j].r - P[i].r, eb = P[j].b - P[i].b;
      const double len2 = er * er + eb * eb;
      if (len2 <= 0.0) continue;
      double t = ((target.r - P[i].r) * er + (target.b - P[i].b) * eb) / len2;
      if (t <= 0.0 || t >= 1.0) continue;  // endpoints already covered
      consider(dist2(P[i].r + t * er, P[i].b + t * eb), {{i, 1.0 - t}, {j, t}});
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const double ar = P[j].r - P[i].r, ab = P[j].b - P[i].b;
        const double br = P[k].r - P[i].r, bb = P[k].b - P[i].b;
        const double det = ar * bb - ab * br;
        if (std::abs(det) < 1e-14) continue;
        const double tr = target.r - P[i].r, tb = target.b - P[i].b;
        const double u = (tr * bb - tb * br) / det;
        const double v = (ar * tb - ab * tr) / det;
        if (u <= 0.0 || v <= 0.0 || u + v >= 1.0) continue;  // boundary handled above
        consider(0.0, {{i, 1.0 - u - v}, {j, u}, {k, v}});
      }
    }
  }
  return best;
}

RgbImage box_downsample(const RgbImage& y, int w, int h) {
  if (y.width <= w && y.height <= h) return y;
  const int ow = std::min(w, y.width), oh = std::min(h, y.height);
  RgbImage out(ow, oh);
  for (int oy = 0; oy < oh; ++oy) {
    const int y0 = int(std::int64_t(oy) * y.height / oh), y1 = int(std::int64_t(oy + 1) * y.height / oh);
    for (int ox = 0; ox < ow; ++ox) {
      const int x0 = int(std::int64_t(ox) * y.width / ow), x1 = int(std::int64_t(ox + 1) * y.width / ow);
      const double area = double(y1 - y0) * double(x1 - x0);
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int yy = y0; yy < y1; ++yy)
          for (int xx = x0; xx < x1; ++xx) s += y.at(c, xx, yy);
        out.at(c, ox, oy) = s / area;
      }
    }
  }
  return out;
}

std::vector<double> awb_estimate_grayworld(const RgbImage& y, const AwbPresets& presets) {
  const auto m = channel_means(box_downsample(y));
  if (!(m[0] > 0.0) || !(m[1] > 0.0) || !(m[2] > 0.0))
    throw InvalidParams("gray-world estimate needs a nonzero mean in every channel");
  return project_to_hull(presets, {m[1] / m[0], m[1] / m[2]});
}

double brightness_gain(const BrightnessParams& p) { return p.beta + p.alpha * std::tanh(p.raw_gain); }

RgbImage brightness_apply(const RgbImage& y, const BrightnessParams& p) {
  if (!std::isfinite(p.raw_gain)) throw InvalidParams("brightness raw_gain must be finite");
  const double g = brightness_gain(p);
  const std::array<double, 3> gains{g, g, g};
  return map_pixels(y, [&](const std::array<double, 3>& px) {
    auto o = highlight_preserving_gain(px, gains);
    for (auto& v : o) v = clamp01(v);
    return o;
  });
}

double brightness_estimate(const RgbImage& y, double target_luma, double alpha, double beta) {
  const double mean = mean_luma(y);
  if (!(mean > 0.0)) throw InvalidParams("brightness estimate needs a positive mean luma");
  const double u = std::clamp((target_luma / mean - beta) / alpha, -0.999, 0.999);
  return std::atanh(u);
}

Eigen::Matrix3d ccm_mix(const CcmPresets& presets, double omega_day, double omega_night) {
  check_simplex({omega_day, omega_night}, 2, "CCM weights");
  return omega_day * presets.day + omega_night * presets.night;
}

RgbImage cc_apply(const RgbImage& y, const CcmPresets& presets, double omega_day, double omega_night) {
  const Eigen::Matrix3d m = ccm_mix(presets, omega_day, omega_night);
  return map_pixels(y, [&](const std::array<double, 3>& px) {
    const Eigen::Vector3d v = m * Eigen::Vector3d(px[0], px[1], px[2]);
    return std::array<double, 3>{clamp01(v[0]), clamp01(v[1]), clamp01(v[2])};
  });
}

double bt709_encode(double L) {
  L = std::max(L, 0.0);
  return L <= 0.018 ? 4.5 * L : 1.099 * std::pow(L, 0.45) - 0.099;
}

double bt709_decode(double V) {
  V = std::max(V, 0.0);
  return V <= 4.5 * 0.018 ? V / 4.5 : std::pow((V + 0.099) / 1.099, 1.0 / 0.45);
}

RgbImage gamma_apply(const RgbImage& y) {
  RgbImage out(y.width, y.height);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < y.pixel_count(); ++i) out.planes[c][i] = clamp01(bt709_encode(y.planes[c][i]));
  return out;
}

RgbImage gamma_invert(const RgbImage& y) {
  RgbImage out(y.width, y.height);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < y.pixel_count(); ++i) out.planes[c][i] = bt709_decode(y.planes[c][i]);
  return out;
}

IspTrace isp_forward_trace(const NormalizedRaw& x, const IspParams& p) {
  p.validate();
  IspTrace t;
  t.demosaiced = demosaic(x);
  t.white_balanced = awb_apply(t.demosaiced, p.awb, p.awb_weights);
  t.brightened = brightness_apply(t.white_balanced, p.brightness);
  t.color_corrected = cc_apply(t.brightened, p.ccm, p.omega_day, p.omega_night);
  t.output = p.gamma == GammaMode::BT709 ? gamma_apply(t.color_corrected) : t.color_corrected;
  return t;
}

RgbImage isp_forward(const NormalizedRaw& x, const IspParams& p) { return isp_forward_trace(x, p).output; }

IspParams GrayWorldEstimator::estimate(const RgbImage& demosaiced, const IspParams& base) const {
  IspParams p = base;
  const RgbImage proxy = box_downsample(demosaiced);
  p.awb_weights = awb_estimate_grayworld(proxy, p.awb);
  const RgbImage wb = awb_apply(proxy, p.awb, p.awb_weights);
  p.brightness.raw_gain = brightness_estimate(wb, target_luma_, p.brightness.alpha, p.brightness.beta);
  return p;
}

RgbImage isp_forward(const NormalizedRaw& x, const IspParams& base, const ParameterEstimator& est) {
  const IspParams p = est.estimate(demosaic(x), base);
  return isp_forward(x, p);
}

}  // namespace rhoraw::isp
