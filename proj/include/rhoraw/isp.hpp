#ifndef RHORAW_ISP_HPP_
#define RHORAW_ISP_HPP_

#include <Eigen/Core>
#include <array>
#include <vector>

#include "rhoraw/image.hpp"

namespace rhoraw::isp {

struct GainPreset {
  double r = 1.0;
  double b = 1.0;
};

// White-balance gain presets, one per reference illuminant.
struct AwbPresets {
  std::vector<GainPreset> presets;
  void validate() const;
};

// Daytime / nighttime colour correction matrices.
struct CcmPresets {
  Eigen::Matrix3d day = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d night = Eigen::Matrix3d::Identity();
  void validate() const;
};

struct BrightnessParams {
  double alpha = 0.3;
  double beta = 1.0;
  double raw_gain = 0.0;
};

enum class GammaMode { BT709, None };

struct IspParams {
  AwbPresets awb;
  std::vector<double> awb_weights;  // on the simplex, one per preset
  BrightnessParams brightness;
  double omega_day = 0.5;
  double omega_night = 0.5;
  CcmPresets ccm;
  GammaMode gamma = GammaMode::BT709;

  void validate() const;
  // A four-illuminant bank and a daylight/night CCM pair; uniform weights.
  static IspParams defaults();
  // Unit gains, identity CCMs, no brightness change.
  static IspParams identity();
};

inline constexpr double kHighlightKnee = 0.9;

// Highlight-preserving gain: with luma p of the input pixel,
// a = (max(p - 0.9, 0) / 0.1)^2 and each channel's effective gain is
// a*max(g,1) + (1-a)*g. Unit gain is the identity.
std::array<double, 3> highlight_preserving_gain(const std::array<double, 3>& px,
                                                const std::array<double, 3>& gains);

// Convex combination of the presets.
GainPreset awb_gains(const AwbPresets& presets, const std::vector<double>& weights);

RgbImage awb_apply(const RgbImage& y, const AwbPresets& presets, const std::vector<double>& weights);

// Simplex weights whose preset combination is the point of the presets'
// convex hull nearest to `target`. Among equally near points the one with the
// fewest active presets (then the lowest indices) wins.
std::vector<double> project_to_hull(const AwbPresets& presets, GainPreset target);

// Gray-world target gains (meanG/meanR, meanG/meanB), measured on a 128x128
// box-downsampled proxy, projected onto the preset hull.
std::vector<double> awb_estimate_grayworld(const RgbImage& y, const AwbPresets& presets);

double brightness_gain(const BrightnessParams& p);
RgbImage brightness_apply(const RgbImage& y, const BrightnessParams& p);
// raw_gain that moves mean luma toward target_luma (clamped to the tanh range).
double brightness_estimate(const RgbImage& y, double target_luma = 0.5, double alpha = 0.3,
                           double beta = 1.0);

Eigen::Matrix3d ccm_mix(const CcmPresets& presets, double omega_day, double omega_night);
RgbImage cc_apply(const RgbImage& y, const CcmPresets& presets, double omega_day, double omega_night);

// ITU-R BT.709 transfer function and its algebraic inverse.
double bt709_encode(double linear);
double bt709_decode(double encoded);
RgbImage gamma_apply(const RgbImage& y);
RgbImage gamma_invert(const RgbImage& y);

// Intermediate images of one forward pass.
struct IspTrace {
  RgbImage demosaiced, white_balanced, brightened, color_corrected, output;
};

IspTrace isp_forward_trace(const NormalizedRaw& x, const IspParams& p);
RgbImage isp_forward(const NormalizedRaw& x, const IspParams& p);

// Area-average downsample to at most (w, h); smaller inputs are copied.
RgbImage box_downsample(const RgbImage& y, int w = 128, int h = 128);

// Produces the per-image ISP parameters. Stands in for the learned
// estimators; FixedEstimator replays externally fitted parameters.
class ParameterEstimator {
 public:
  virtual ~ParameterEstimator() = default;
  virtual IspParams estimate(const RgbImage& demosaiced, const IspParams& base) const = 0;
};

class GrayWorldEstimator final : public ParameterEstimator {
 public:
  explicit GrayWorldEstimator(double target_luma = 0.5) : target_luma_(target_luma) {}
  IspParams estimate(const RgbImage& demosaiced, const IspParams& base) const override;

 private:
  double target_luma_;
};

class FixedEstimator final : public ParameterEstimator {
 public:
  explicit FixedEstimator(IspParams params) : params_(std::move(params)) {}
  IspParams estimate(const RgbImage&, const IspParams&) const override { return params_; }

 private:
  IspParams params_;
};

RgbImage isp_forward(const NormalizedRaw& x, const IspParams& base, const ParameterEstimator& est);

}  // namespace rhoraw::isp

#endif  // RHORAW_ISP_HPP_
