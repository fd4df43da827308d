#include "rhoraw/image.hpp"

#include <string>

#include "rhoraw/error.hpp"

namespace rhoraw {

namespace {

// Channel for each quad position (row-major: (0,0), (0,1), (1,0), (1,1)).
constexpr BayerChannel kLayout[5][4] = {
    {BayerChannel::R, BayerChannel::Gr, BayerChannel::Gb, BayerChannel::B},   // RGGB
    {BayerChannel::B, BayerChannel::Gb, BayerChannel::Gr, BayerChannel::R},   // BGGR
    {BayerChannel::Gr, BayerChannel::R, BayerChannel::B, BayerChannel::Gb},   // GRBG
    {BayerChannel::Gb, BayerChannel::B, BayerChannel::R, BayerChannel::Gr},   // GBRG
    {BayerChannel::R, BayerChannel::Gr, BayerChannel::Gb, BayerChannel::B},   // RYYB
};

}  // namespace

std::string_view to_string(CfaPattern p) {
  switch (p) {
    case CfaPattern::RGGB: return "RGGB";
    case CfaPattern::BGGR: return "BGGR";
    case CfaPattern::GRBG: return "GRBG";
    case CfaPattern::GBRG: return "GBRG";
    case CfaPattern::RYYB: return "RYYB";
  }
  return "?";
}

CfaPattern parse_pattern(std::string_view name) {
  for (int i = 0; i <= 4; ++i) {
    auto p = CfaPattern(i);
    if (to_string(p) == name) return p;
  }
  throw InvalidMetadata("unknown CFA pattern '" + std::string(name) + "'");
}

BayerChannel channel_at(CfaPattern p, int row, int col) {
  return kLayout[int(p)][(row & 1) * 2 + (col & 1)];
}

CfaColor color_of(BayerChannel c) {
  switch (c) {
    case BayerChannel::R: return CfaColor::Red;
    case BayerChannel::B: return CfaColor::Blue;
    default: return CfaColor::Green;
  }
}

std::pair<int, int> channel_offset(CfaPattern p, BayerChannel c) {
  for (int i = 0; i < 4; ++i)
    if (kLayout[int(p)][i] == c) return {i / 2, i % 2};
  return {0, 0};
}

void RawMeta::validate() const {
  if (static_cast<unsigned>(pattern) > 4u) throw InvalidMetadata("invalid CFA pattern code");
  if (bit_depth < 8 || bit_depth > 16)
    throw InvalidMetadata("bit depth " + std::to_string(bit_depth) + " outside 8..16");
  if (saturation_lev <= black_lev)
    throw InvalidMetadata("saturation level must exceed black level");
  if (saturation_lev > max_code())
    throw InvalidMetadata("saturation level exceeds bit depth range");
}

void BayerRaw::validate() const {
  meta.validate();
  if (width <= 0 || height <= 0 || width % 2 || height % 2)
    throw DimensionError("Bayer dimensions must be positive and even");
  if (samples.size() != std::size_t(width) * std::size_t(height))
    throw DimensionError("sample count does not match dimensions");
  const auto hi = meta.max_code();
  for (auto s : samples)
    if (s > hi) throw InvalidMetadata("sample exceeds bit depth range");
}

}  // namespace rhoraw
