#ifndef RHORAW_STATS_HPP_
#define RHORAW_STATS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rhoraw/image.hpp"

namespace rhoraw::stats {

inline constexpr double kMinK = -6.0;
inline constexpr double kMaxK = 12.0;

// Patch-mean density p(mu) = k mu^2 - k mu + k/6 + 1 on [0,1]. It integrates
// to one for every k and is nonnegative exactly when k is in [-6, 12].
struct KQuadModel {
  double k = 0.0;
  double density(double mu) const { return k * mu * mu - k * mu + k / 6.0 + 1.0; }
  double integral() const { return k / 3.0 - k / 2.0 + k / 6.0 + 1.0; }
  // Var[mu - 0.5] under the density.
  double centered_variance() const { return k / 180.0 + 1.0 / 12.0; }
  double envelope() const;
  static bool admissible(double k) { return k >= kMinK && k <= kMaxK; }
};

// Rejection sampling against the constant envelope max(p(0), p(0.5)).
std::vector<double> sample_kquad(double k, std::size_t n, std::uint64_t seed);

struct KFit {
  double k = 0.0;            // clamped to [-6, 12]
  double k_unclamped = 0.0;
  std::size_t samples = 0;
  bool clamped() const { return k != k_unclamped; }
};

inline constexpr int kFitBins = 64;
inline constexpr std::size_t kMinFitSamples = 100;

// Least squares on the density-normalized histogram of the samples (values
// clipped to [0,1]). Each bin compares h_i - 1 with the bin average of
// mu^2 - mu + 1/6, all bins weighted equally.
KFit fit_k(const std::vector<double>& samples, int bins = kFitBins);

struct PatchStats {
  int patch_size = 16;
  std::vector<double> means;
  std::vector<double> sigmas;
};

// Non-overlapping patches; a trailing partial patch is dropped. RGB images
// are reduced to the per-pixel channel mean first.
PatchStats patch_stats(const NormalizedRaw& x, int patch_size = 16);
PatchStats patch_stats(const RgbImage& y, int patch_size = 16);

KFit fit_k(const NormalizedRaw& x, int patch_size = 16);
KFit fit_k(const RgbImage& y, int patch_size = 16);

struct GammaKReport {
  KFit before;
  KFit after;
};

// Fits k before and after the BT.709 transfer curve is applied to every
// sample.
GammaKReport gamma_k_report(const NormalizedRaw& x, int patch_size = 16);
GammaKReport gamma_k_report(const RgbImage& y, int patch_size = 16);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);
// Rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct GradVarConfig {
  int patch = 8;                 // H = W
  std::size_t trials = 50000;
  double eta = 1e-2;             // weights and bias ~ U(-eta, eta)
  double patch_sigma = 0.02;     // within-patch spread around mu
  double label_scale = 1.0;      // labels ~ label_scale * U(0, 1)
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct GradVarRow {
  double k = 0.0;
  double variance = 0.0;
};

struct GradVarResult {
  std::vector<GradVarRow> rows;
  LinearFit fit;
};

// Empirical variance of dL/dw for one weight of a single-layer regressor
// L = (w . (P - 0.5) + b - y_hat)^2 / (H W) over random patches P whose mean
// is drawn from p_k.
GradVarResult grad_var_mc(const std::vector<double>& k_grid, const GradVarConfig& cfg);

struct BnSimConfig {
  int batch_size = 4;  // M
  std::size_t n_batches = 500;
  std::size_t n_repeats = 500;
  std::vector<double> k_grid = {0, 2, 4, 6, 8, 10, 12};
  std::uint64_t seed = 0;
  unsigned threads = 1;
  void validate() const;
};

struct BnRow {
  double k = 0.0;
  double value = 0.0;  // Var_n[y_BN] / A^2
};

struct BnResult {
  std::vector<BnRow> rows;
  double spearman = 0.0;
};

// For each repeat a patch mean mu* is fixed; each of n_batches mini-batches
// adds M - 1 further means from p_k and contributes
// 1 / sqrt(Var_m[P - 0.5]). The variance across mini-batches is averaged
// over repeats.
BnResult bn_var_mc(const BnSimConfig& cfg);

}  // namespace rhoraw::stats

#endif  // RHORAW_STATS_HPP_
