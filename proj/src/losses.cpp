#include "rhoraw/losses.hpp"

#include <algorithm>
#include <cmath>

#include "rhoraw/error.hpp"

namespace rhoraw::losses {

double cycle_loss(const RgbImage& y_rec, const RgbImage& y) {
  if (y_rec.width != y.width || y_rec.height != y.height)
    throw DimensionError("cycle_loss: image sizes differ");
  const std::size_t n = y.pixel_count();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < n; ++i) sum += std::abs(y_rec.planes[c][i] - y.planes[c][i]);
  return sum / double(3 * n);
}

YuvImage to_yuv(const RgbImage& rgb) {
  YuvImage out;
  out.width = rgb.width;
  out.height = rgb.height;
  const std::size_t n = rgb.pixel_count();
  out.y.resize(n);
  out.u.resize(n);
  out.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::clamp(rgb.planes[0][i], 0.0, 1.0);
    const double g = std::clamp(rgb.planes[1][i], 0.0, 1.0);
    const double b = std::clamp(rgb.planes[2][i], 0.0, 1.0);
    out.y[i] = luma601(r, g, b);
    out.u[i] = -0.168736 * r - 0.331264 * g + 0.5 * b;
    out.v[i] = 0.5 * r - 0.418688 * g - 0.081312 * b;
  }
  return out;
}

double var_loss(const YuvImage& x1, const YuvImage& x2, double theta1, double phi1, double theta2,
                double phi2) {
  if (x1.width != x2.width || x1.height != x2.height) throw DimensionError("var_loss: image sizes differ");
  const double dtheta = std::abs(theta1 - theta2);
  const double dphi = std::abs(phi1 - phi2);
  if (dtheta <= kEps || dphi <= kEps) throw DegeneratePair("var_loss: latent gap too small");
  const std::size_t n = x1.y.size();
  if (n == 0) return 0.0;
  double chroma = 0.0, luma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double du = x1.u[i] - x2.u[i];
    const double dv = x1.v[i] - x2.v[i];
    const double dy = x1.y[i] - x2.y[i];
    chroma += du * du + dv * dv;
    luma += dy * dy;
  }
  return -std::sqrt(chroma / double(n)) / dtheta - std::sqrt(luma / double(n)) / dphi;
}

AdvLosses adv_losses(double d_real, double d_fake) {
  return {(1.0 - d_fake) * (1.0 - d_fake), (1.0 - d_real) * (1.0 - d_real) + d_fake * d_fake};
}

int chroma_bin(double log_ratio) {
  const double width = 2.0 * kChromaRange / kChromaBins;
  const double f = std::floor((log_ratio + kChromaRange) / width);
  if (!(f >= 0.0)) return 0;
  if (f >= kChromaBins) return kChromaBins - 1;
  // The shift by kChromaRange can round across an edge; edges are exact.
  int bin = int(f);
  if (bin > 0 && log_ratio < -kChromaRange + bin * width) --bin;
  if (bin + 1 < kChromaBins && log_ratio >= -kChromaRange + (bin + 1) * width) ++bin;
  return bin;
}

ChromaHistogram2D chroma_hist(const RgbImage& y) {
  ChromaHistogram2D h;
  const std::size_t n = y.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y.planes[0][i], g = y.planes[1][i], b = y.planes[2][i];
    if (g <= kEps || r <= 0.0 || b <= 0.0) {
      ++h.excluded;
      continue;
    }
    const int u = chroma_bin(std::log(r / g));
    const int v = chroma_bin(std::log(b / g));
    h.bins[std::size_t(u) * kChromaBins + v] += 1.0;
    ++h.counted;
  }
  if (h.counted > 0)
    for (double& b : h.bins) b /= double(h.counted);
  return h;
}

GrayHistogram1D gray_hist(const RgbImage& y) {
  GrayHistogram1D h;
  const std::size_t n = y.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double l = std::clamp(luma601(y.planes[0][i], y.planes[1][i], y.planes[2][i]), 0.0, 1.0);
    const int bin = std::min(kGrayBins - 1, int(l * kGrayBins));
    h.bins[bin] += 1.0;
  }
  h.counted = n;
  if (n > 0)
    for (double& b : h.bins) b /= double(n);
  return h;
}

}  // namespace rhoraw::losses
