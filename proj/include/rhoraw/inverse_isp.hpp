#ifndef RHORAW_INVERSE_ISP_HPP_
#define RHORAW_INVERSE_ISP_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rhoraw/image.hpp"
#include "rhoraw/isp.hpp"

namespace rhoraw::invisp {

struct GaussianLatent {
  double mean = 0.0;
  double sigma = 1.0;
};

// theta steers colour temperature, phi steers exposure.
struct IlluminationPrior {
  GaussianLatent theta;
  GaussianLatent phi;
  std::uint64_t seed = 0;
  void validate() const;
};

struct Illumination {
  double theta = 0.0;
  double phi = 0.0;
  friend bool operator==(const Illumination&, const Illumination&) = default;
};

// n i.i.d. draws; theta_j is drawn before phi_j. Same seed, same sequence.
std::vector<Illumination> sample_illumination(const IlluminationPrior& prior, std::size_t n);

// Deterministic maps from the latents to inverse-stage weights:
//   rho_awb(theta) = softmax(awb_slope * theta + awb_bias)
//   rho_cc(theta)  = softmax over {day, night} of cc_slope * theta + cc_bias
//   raw_gain(phi)  = brightness_scale * phi + brightness_bias
// With zero biases, theta = phi = 0 yields uniform weights and unit b_gain.
struct InverseMaps {
  std::vector<double> awb_slope;
  std::vector<double> awb_bias;
  double cc_slope[2] = {1.0, -1.0};
  double cc_bias[2] = {0.0, 0.0};
  double brightness_scale = 1.0;
  double brightness_bias = 0.0;

  std::vector<double> awb_weights(double theta) const;
  std::pair<double, double> cc_weights(double theta) const;
  double raw_gain(double phi) const;
  void validate(std::size_t n_presets) const;

  // Slopes spread evenly over [-1, 1], zero biases.
  static InverseMaps neutral(std::size_t n_presets);
};

struct InvIspParams {
  isp::IspParams banks;  // presets, alpha/beta and gamma mode; weights unused
  InverseMaps maps;
  RawMeta raw{CfaPattern::RGGB, 12, 0, 4095};

  void validate() const;
  static InvIspParams defaults();
};

// (1/r_gain, 1/b_gain) = sum_i rho_i * (1/r_i, 1/b_i); plain per-channel
// multiply, no clamping.
RgbImage inv_awb(const RgbImage& y, const isp::AwbPresets& presets, const std::vector<double>& rho);
RgbImage inv_awb(const RgbImage& y, const InvIspParams& p, double theta);

RgbImage inv_brightness(const RgbImage& y, double b_gain);
RgbImage inv_brightness(const RgbImage& y, const InvIspParams& p, double phi);

// Applies (rho_d * CCM_d + rho_n * CCM_n)^-1; throws SingularMatrix if
// |det| < 1e-6.
RgbImage inv_cc(const RgbImage& y, const isp::CcmPresets& presets, double rho_day, double rho_night);
RgbImage inv_cc(const RgbImage& y, const InvIspParams& p, double theta);

Eigen::Matrix3d inverse_ccm(const isp::CcmPresets& presets, double rho_day, double rho_night);

// gamma^-1 -> inverse CC -> inverse brightness -> inverse AWB -> clamp -> mosaic.
NormalizedRaw inv_isp(const RgbImage& y, const InvIspParams& p, double theta, double phi);
BayerRaw inv_isp_raw(const RgbImage& y, const InvIspParams& p, double theta, double phi);

// Forward parameters mirroring the inverse stages chosen by (theta, phi):
// AWB weights reproduce the inverse gains (projected onto the preset hull),
// CCM weights equal rho_cc and raw_gain equals the inverse raw gain.
isp::IspParams consistent_forward_params(const InvIspParams& p, double theta, double phi);

struct SimrawEntry {
  std::string input;
  std::string output;
  std::size_t index = 0;
  double theta = 0.0;
  double phi = 0.0;
  std::uint64_t seed = 0;
};

struct SimrawFailure {
  std::string input;
  std::string error;
};

struct SimrawReport {
  std::vector<SimrawEntry> entries;
  std::vector<SimrawFailure> failures;
};

// Per-image seed derived from the prior's seed and the input's position in
// the list, so outputs do not depend on scheduling.
std::uint64_t image_seed(std::uint64_t seed, std::size_t image_index);

// Writes n_per_image .braw files per input (<stem>_<j>.braw) and returns the
// manifest rows. Unreadable inputs are reported and skipped.
SimrawReport simraw_batch(const std::vector<std::filesystem::path>& inputs, const IlluminationPrior& prior,
                          const InvIspParams& params, std::size_t n_per_image,
                          const std::filesystem::path& out_dir, unsigned threads = 1);

}  // namespace rhoraw::invisp

#endif  // RHORAW_INVERSE_ISP_HPP_
