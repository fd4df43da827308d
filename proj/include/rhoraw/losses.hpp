#ifndef RHORAW_LOSSES_HPP_
#define RHORAW_LOSSES_HPP_

#include <cstddef>
#include <vector>

#include "rhoraw/image.hpp"

namespace rhoraw::losses {

inline constexpr double kEps = 1e-6;
inline constexpr int kChromaBins = 64;
inline constexpr double kChromaRange = 4.0;
inline constexpr int kGrayBins = 64;

// Mean absolute difference over every channel-pixel.
double cycle_loss(const RgbImage& y_rec, const RgbImage& y);

// BT.601 full-range YCbCr, chroma centred on zero.
struct YuvImage {
  int width = 0;
  int height = 0;
  std::vector<double> y, u, v;
};

YuvImage to_yuv(const RgbImage& rgb);

// -rms((u,v) difference) / |dtheta| - rms(y difference) / |dphi|.
// Throws DegeneratePair if either latent gap is <= kEps.
double var_loss(const YuvImage& x1, const YuvImage& x2, double theta1, double phi1, double theta2,
                double phi2);

struct AdvLosses {
  double generator = 0.0;
  double discriminator = 0.0;
};

// Least-squares GAN losses on scalar discriminator scores.
AdvLosses adv_losses(double d_real, double d_fake);

// 64x64 histogram over (log(R/G), log(B/G)) in [-4, 4]^2; bins are
// lower-inclusive and values outside the range land in the edge bins.
// Pixels with G <= kEps, R <= 0 or B <= 0 are skipped and counted.
struct ChromaHistogram2D {
  std::vector<double> bins = std::vector<double>(kChromaBins * kChromaBins, 0.0);
  std::size_t counted = 0;
  std::size_t excluded = 0;
  double at(int u, int v) const { return bins[std::size_t(u) * kChromaBins + v]; }
};

struct GrayHistogram1D {
  std::vector<double> bins = std::vector<double>(kGrayBins, 0.0);
  std::size_t counted = 0;
};

int chroma_bin(double log_ratio);
ChromaHistogram2D chroma_hist(const RgbImage& y);
// Histogram of BT.601 luma clamped to [0, 1].
GrayHistogram1D gray_hist(const RgbImage& y);

}  // namespace rhoraw::losses

#endif  // RHORAW_LOSSES_HPP_
