#ifndef RHORAW_RIC_CONTEXT_MODEL_HPP_
#define RHORAW_RIC_CONTEXT_MODEL_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rhoraw/ric/pyramid.hpp"
#include "rhoraw/ric/range_coder.hpp"
#include "rhoraw/ric/sigmoid.hpp"

namespace rhoraw::ric {

enum class Profile : std::uint8_t { Static = 0, Fitted = 1 };

inline constexpr int kScales = kLevels - 1;  // coded refinement scales 1..4
inline constexpr int kPositions = 3;         // (0,1), (1,0), (1,1) of each 2x2 group
inline constexpr int kModelCount = kScales * kPositions * 4;
// Channel coding order inside a group: g_r, g_b, r, b.
inline constexpr std::array<int, 4> kMpuOrder = {1, 2, 0, 3};
// (dy, dx) of the coded positions.
inline constexpr std::array<std::pair<int, int>, kPositions> kPositionOffsets = {{{0, 1}, {1, 0}, {1, 1}}};

inline constexpr std::int32_t kQ16 = 1 << 16;
inline constexpr std::int32_t kWeightTotal = 1 << 15;
inline constexpr std::int32_t kSigmaMinQ16 = 66;  // ceil(1e-3 * 2^16)

struct ComponentQ {
  std::int32_t offset_q16 = 0;  // added to the predicted mean
  std::int32_t sigma_q16 = kQ16;
  std::int32_t weight_q15 = kWeightTotal;
  std::int64_t inv_sigma = 0;  // floor(2^32 / sigma_q16), derived
  friend bool operator==(const ComponentQ& a, const ComponentQ& b) {
    return a.offset_q16 == b.offset_q16 && a.sigma_q16 == b.sigma_q16 && a.weight_q15 == b.weight_q15;
  }
};

// Linear predictor and residual mixture for one (scale, position, channel).
// With U = 4 x the bilinear parent estimate and D_j = 4 x_j - U_j for the
// channels already coded at the same location, the mean in Q16 symbol units
// is bias + ((parent * U + sum cross_j * D_j) >> 2).
struct ModelParams {
  std::int32_t bias_q16 = 0;
  std::int32_t parent_q16 = kQ16;
  std::vector<std::int32_t> cross_q16;
  std::vector<ComponentQ> components;

  void finalize();
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct ContextModel {
  Profile profile = Profile::Static;
  std::array<ModelParams, kModelCount> models;

  static int index(int scale, int position, int mpu_slot) {
    return ((scale - 1) * kPositions + position) * 4 + mpu_slot;
  }
  ModelParams& at(int scale, int position, int mpu_slot) { return models[index(scale, position, mpu_slot)]; }
  const ModelParams& at(int scale, int position, int mpu_slot) const {
    return models[index(scale, position, mpu_slot)];
  }

  // Unit parent weight, no cross terms, ten zero-mean components with scales
  // 0.25 * 2^k symbols and equal weights. Nothing is stored in the stream.
  static ContextModel static_profile();

  std::vector<std::uint8_t> serialize() const;
  // Throws FormatError on malformed input.
  static ContextModel deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const ContextModel&, const ContextModel&) = default;
};

std::int64_t predict_q16(const ModelParams& m, std::int64_t u, const std::int64_t* d, int s);

struct FitOptions {
  bool cross_channel = true;
  unsigned threads = 1;
  int em_iterations = 20;
  std::size_t em_samples = 4096;
};

// Least-squares predictor per model, quantized, then an EM-fitted logistic
// mixture on the residuals of the quantized predictor. Pyramid in symbol
// units (sample - black level).
ContextModel fit_context(const Pyramid& symbols, int s, const FitOptions& opt = {});

// Visits every coded sample of one refinement scale in coding order, given
// the parent level. fn(position, mpu_slot, channel, x, y, U, D) returns the
// sample's symbol, which then feeds D for later channels at that location.
template <class Fn>
void traverse_scale(const Planes& parent, Fn&& fn) {
  for (int gy = 0; gy < parent.height; ++gy) {
    const int gy1 = gy + 1 < parent.height ? gy + 1 : gy;
    for (int gx = 0; gx < parent.width; ++gx) {
      const int gx1 = gx + 1 < parent.width ? gx + 1 : gx;
      std::int64_t a[4], b[4], c[4], d[4];
      for (int ch = 0; ch < 4; ++ch) {
        a[ch] = parent.at(ch, gx, gy);
        b[ch] = parent.at(ch, gx1, gy);
        c[ch] = parent.at(ch, gx, gy1);
        d[ch] = parent.at(ch, gx1, gy1);
      }
      for (int pos = 0; pos < kPositions; ++pos) {
        const int x = 2 * gx + kPositionOffsets[pos].second;
        const int y = 2 * gy + kPositionOffsets[pos].first;
        std::int64_t u[4];
        for (int ch = 0; ch < 4; ++ch) {
          if (pos == 0)
            u[ch] = 2 * (a[ch] + b[ch]);
          else if (pos == 1)
            u[ch] = 2 * (a[ch] + c[ch]);
          else
            u[ch] = a[ch] + b[ch] + c[ch] + d[ch];
        }
        std::int64_t innov[4];
        for (int slot = 0; slot < 4; ++slot) {
          const int ch = kMpuOrder[slot];
          const std::int64_t sym = fn(pos, slot, ch, x, y, u[ch], static_cast<const std::int64_t*>(innov));
          innov[slot] = 4 * sym - u[ch];
        }
      }
    }
  }
}

// Integer coding distribution over [0, s] for one sample. The CDF is the
// weighted sum of table sigmoids at the bin edges, with the first edge
// pinned to 0 and the last to 2^39. Symbols are coded in two steps: a bucket
// of 2^shift symbols out of at most 1024, then the offset inside the bucket.
// Both steps give every symbol a nonzero count out of 2^16.
class SymbolModel {
 public:
  static constexpr int kCdfShift = 39;
  static constexpr std::int64_t kCdfOne = std::int64_t(1) << kCdfShift;
  static constexpr std::uint32_t kTotal = 1u << 16;
  static constexpr int kMaxBucketBits = 10;

  SymbolModel(const SigmoidTable& table, int s);

  void set(const ModelParams& m, std::int64_t mu_q16);
  std::int64_t cdf(std::int64_t j) const;

  void encode(RangeEncoder& enc, int sym) const;
  int decode(RangeDecoder& dec) const;
  double cost_bits(int sym) const;

  int bucket_shift() const { return shift_; }
  int bucket_count() const { return buckets_; }

 private:
  std::uint32_t bucket_cum(int b) const;
  std::uint32_t inner_cum(int lo, int n, std::int64_t base, std::int64_t mass, int j) const;

  const SigmoidTable& table_;
  int s_;
  int alphabet_;
  int shift_;
  int buckets_;
  int k_ = 0;
  std::int64_t means_[16];
  std::int64_t inv_[16];
  std::int64_t weights_[16];
};

// Adaptive binary-tree model for the coarsest level: one 12-bit probability
// per tree node, MSB first.
class BitTreeModel {
 public:
  explicit BitTreeModel(int bits);
  void encode(RangeEncoder& enc, int value);
  int decode(RangeDecoder& dec);
  // Cost of `value` under the current state; the state is then updated.
  double cost_and_update(int value);

 private:
  static constexpr int kProbBits = 12;
  void update(int node, int bit);
  int bits_;
  std::vector<std::uint16_t> p0_;
};

int symbol_bits(int s);

}  // namespace rhoraw::ric

#endif  // RHORAW_RIC_CONTEXT_MODEL_HPP_
