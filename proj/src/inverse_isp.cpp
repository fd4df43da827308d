#include "rhoraw/inverse_isp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <tuple>

#include "rhoraw/error.hpp"
#include "rhoraw/io.hpp"
#include "rhoraw/parallel.hpp"
#include "rhoraw/random.hpp"
#include "rhoraw/raw.hpp"

namespace rhoraw::invisp {

namespace {

std::vector<double> softmax(const std::vector<double>& scores) {
  const double mx = *std::max_element(scores.begin(), scores.end());
  std::vector<double> w(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) sum += (w[i] = std::exp(scores[i] - mx));
  for (auto& v : w) v /= sum;
  return w;
}

}  // namespace

void IlluminationPrior::validate() const {
  if (!(theta.sigma >= 0.0) || !(phi.sigma >= 0.0)) throw InvalidParams("prior sigmas must be >= 0");
  if (!std::isfinite(theta.mean) || !std::isfinite(phi.mean)) throw InvalidParams("prior means must be finite");
}

std::vector<Illumination> sample_illumination(const IlluminationPrior& prior, std::size_t n) {
  prior.validate();
  if (n == 0) throw InvalidParams("sample count must be >= 1");
  Rng rng(prior.seed);
  std::vector<Illumination> out(n);
  for (auto& s : out) {
    s.theta = rng.normal(prior.theta.mean, prior.theta.sigma);
    s.phi = rng.normal(prior.phi.mean, prior.phi.sigma);
  }
  return out;
}

std::vector<double> InverseMaps::awb_weights(double theta) const {
  std::vector<double> scores(awb_slope.size());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = awb_slope[i] * theta + awb_bias[i];
  return softmax(scores);
}

std::pair<double, double> InverseMaps::cc_weights(double theta) const {
  const auto w = softmax({cc_slope[0] * theta + cc_bias[0], cc_slope[1] * theta + cc_bias[1]});
  return {w[0], w[1]};
}

double InverseMaps::raw_gain(double phi) const { return brightness_scale * phi + brightness_bias; }

void InverseMaps::validate(std::size_t n_presets) const {
  if (awb_slope.size() != n_presets || awb_bias.size() != n_presets)
    throw InvalidParams("inverse AWB map needs one slope and bias per preset");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(awb_slope.begin(), awb_slope.end(), finite) ||
      !std::all_of(awb_bias.begin(), awb_bias.end(), finite) || !finite(cc_slope[0]) || !finite(cc_slope[1]) ||
      !finite(cc_bias[0]) || !finite(cc_bias[1]) || !finite(brightness_scale) || !finite(brightness_bias))
    throw InvalidParams("inverse map coefficients must be finite");
}

InverseMaps InverseMaps::neutral(std::size_t n) {
  InverseMaps m;
  m.awb_slope.resize(n);
  m.awb_bias.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m.awb_slope[i] = n == 1 ? 0.0 : -1.0 + 2.0 * double(i) / double(n - 1);
  return m;
}

void InvIspParams::validate() const {
  banks.awb.validate();
  banks.ccm.validate();
  if (!(banks.brightness.alpha > 0.0 && banks.brightness.alpha < 1.0) ||
      !(banks.brightness.beta > banks.brightness.alpha))
    throw InvalidParams("brightness alpha/beta out of range");
  maps.validate(banks.awb.presets.size());
  raw.validate();
}

InvIspParams InvIspParams::defaults() {
  InvIspParams p;
  p.banks = isp::IspParams::defaults();
  p.maps = InverseMaps::neutral(p.banks.awb.presets.size());
  return p;
}

RgbImage inv_awb(const RgbImage& y, const isp::AwbPresets& presets, const std::vector<double>& rho) {
  presets.validate();
  if (rho.size() != presets.presets.size()) throw InvalidParams("inverse AWB: one weight per preset required");
  double inv_r = 0.0, inv_b = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    inv_r += rho[i] / presets.presets[i].r;
    inv_b += rho[i] / presets.presets[i].b;
  }
  if (!(inv_r > 0.0) || !(inv_b > 0.0)) throw InvalidParams("inverse AWB: degenerate gains");
  RgbImage out = y;
  for (auto& v : out.planes[0]) v *= inv_r;
  for (auto& v : out.planes[2]) v *= inv_b;
  return out;
}

RgbImage inv_awb(const RgbImage& y, const InvIspParams& p, double theta) {
  return inv_awb(y, p.banks.awb, p.maps.awb_weights(theta));
}

RgbImage inv_brightness(const RgbImage& y, double b_gain) {
  if (!(b_gain > 0.0)) throw InvalidParams("inverse brightness: gain must be positive");
  RgbImage out = y;
  for (auto& plane : out.planes)
    for (auto& v : plane) v /= b_gain;
  return out;
}

RgbImage inv_brightness(const RgbImage& y, const InvIspParams& p, double phi) {
  isp::BrightnessParams b = p.banks.brightness;
  b.raw_gain = p.maps.raw_gain(phi);
  return inv_brightness(y, isp::brightness_gain(b));
}

Eigen::Matrix3d inverse_ccm(const isp::CcmPresets& presets, double rho_day, double rho_night) {
  const Eigen::Matrix3d m = rho_day * presets.day + rho_night * presets.night;
  const Eigen::PartialPivLU<Eigen::Matrix3d> lu(m);
  if (!(std::abs(lu.determinant()) >= 1e-6)) throw SingularMatrix("mixed CCM is singular (|det| < 1e-6)");
  return lu.inverse();
}

RgbImage inv_cc(const RgbImage& y, const isp::CcmPresets& presets, double rho_day, double rho_night) {
  const Eigen::Matrix3d inv = inverse_ccm(presets, rho_day, rho_night);
  RgbImage out(y.width, y.height);
  for (std::size_t i = 0; i < y.pixel_count(); ++i) {
    const Eigen::Vector3d v = inv * Eigen::Vector3d(y.planes[0][i], y.planes[1][i], y.planes[2][i]);
    for (int c = 0; c < 3; ++c) out.planes[c][i] = v[c];
  }
  return out;
}

RgbImage inv_cc(const RgbImage& y, const InvIspParams& p, double theta) {
  const auto [d, n] = p.maps.cc_weights(theta);
  return inv_cc(y, p.banks.ccm, d, n);
}

NormalizedRaw inv_isp(const RgbImage& y, const InvIspParams& p, double theta, double phi) {
  p.validate();
  RgbImage lin = p.banks.gamma == isp::GammaMode::BT709 ? isp::gamma_invert(y) : y;
  RgbImage b = inv_cc(lin, p, theta);
  RgbImage wb = inv_brightness(b, p, phi);
  RgbImage demo = inv_awb(wb, p, theta);
  for (auto& plane : demo.planes)
    for (auto& v : plane) v = std::clamp(v, 0.0, 1.0);
  return mosaic(demo, p.raw);
}

BayerRaw inv_isp_raw(const RgbImage& y, const InvIspParams& p, double theta, double phi) {
  return denormalize(inv_isp(y, p, theta, phi));
}

isp::IspParams consistent_forward_params(const InvIspParams& p, double theta, double phi) {
  isp::IspParams f = p.banks;
  const auto rho = p.maps.awb_weights(theta);
  double inv_r = 0.0, inv_b = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    inv_r += rho[i] / f.awb.presets[i].r;
    inv_b += rho[i] / f.awb.presets[i].b;
  }
  f.awb_weights = isp::project_to_hull(f.awb, {1.0 / inv_r, 1.0 / inv_b});
  std::tie(f.omega_day, f.omega_night) = p.maps.cc_weights(theta);
  f.brightness.raw_gain = p.maps.raw_gain(phi);
  return f;
}

std::uint64_t image_seed(std::uint64_t seed, std::size_t image_index) { return stream_seed(seed, image_index); }

SimrawReport simraw_batch(const std::vector<std::filesystem::path>& inputs, const IlluminationPrior& prior,
                          const InvIspParams& params, std::size_t n_per_image,
                          const std::filesystem::path& out_dir, unsigned threads) {
  prior.validate();
  params.validate();
  if (n_per_image == 0) throw InvalidParams("n_per_image must be >= 1");
  std::filesystem::create_directories(out_dir);

  struct Slot {
    std::vector<SimrawEntry> entries;
    std::string error;
  };
  std::vector<Slot> slots(inputs.size());
  parallel_for(inputs.size(), threads, [&](std::size_t i) {
    Slot& slot = slots[i];
    try {
      const RgbImage y = io::read_ppm(inputs[i]);
      IlluminationPrior per_image = prior;
      per_image.seed = image_seed(prior.seed, i);
      const auto draws = sample_illumination(per_image, n_per_image);
      for (std::size_t j = 0; j < draws.size(); ++j) {
        const auto out = out_dir / (inputs[i].stem().string() + "_" + std::to_string(j) + ".braw");
        io::write_braw(out, inv_isp_raw(y, params, draws[j].theta, draws[j].phi));
        slot.entries.push_back({inputs[i].string(), out.string(), j, draws[j].theta, draws[j].phi, per_image.seed});
      }
    } catch (const std::exception& e) {
      slot.entries.clear();
      slot.error = e.what();
    }
  });

  SimrawReport report;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].error.empty()) report.failures.push_back({inputs[i].string(), slots[i].error});
    for (auto& e : slots[i].entries) report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace rhoraw::invisp
