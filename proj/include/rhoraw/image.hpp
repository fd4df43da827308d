#ifndef RHORAW_IMAGE_HPP_
#define RHORAW_IMAGE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rhoraw {

// Colour filter arrangement of the top-left 2x2 quad. RYYB has the RGGB
// geometry with yellow in place of green.
enum class CfaPattern : std::uint8_t { RGGB = 0, BGGR = 1, GRBG = 2, GBRG = 3, RYYB = 4 };

// Plane order of a PlaneStack: r, g_r (green on red rows), g_b, b.
enum class BayerChannel : int { R = 0, Gr = 1, Gb = 2, B = 3 };

// Colour of a site for demosaicing. Yellow sites are handled as green.
enum class CfaColor : int { Red = 0, Green = 1, Blue = 2 };

std::string_view to_string(CfaPattern p);
CfaPattern parse_pattern(std::string_view name);

BayerChannel channel_at(CfaPattern p, int row, int col);
CfaColor color_of(BayerChannel c);
// (row, col) of the channel inside the 2x2 quad.
std::pair<int, int> channel_offset(CfaPattern p, BayerChannel c);

struct RawMeta {
  CfaPattern pattern = CfaPattern::RGGB;
  int bit_depth = 12;
  std::uint16_t black_lev = 0;
  std::uint16_t saturation_lev = 4095;

  std::uint32_t max_code() const { return (1u << bit_depth) - 1u; }
  int span() const { return int(saturation_lev) - int(black_lev); }
  // Throws InvalidMetadata.
  void validate() const;

  friend bool operator==(const RawMeta&, const RawMeta&) = default;
};

struct BayerRaw {
  int width = 0;
  int height = 0;
  RawMeta meta;
  std::vector<std::uint16_t> samples;  // row-major

  BayerRaw() = default;
  BayerRaw(int w, int h, RawMeta m)
      : width(w), height(h), meta(m), samples(std::size_t(w) * std::size_t(h), m.black_lev) {}

  std::uint16_t& at(int x, int y) { return samples[std::size_t(y) * width + x]; }
  std::uint16_t at(int x, int y) const { return samples[std::size_t(y) * width + x]; }

  // Checks metadata, even dimensions, payload length and sample range.
  void validate() const;

  friend bool operator==(const BayerRaw&, const BayerRaw&) = default;
};

struct NormalizedRaw {
  int width = 0;
  int height = 0;
  RawMeta meta;
  std::vector<double> samples;  // row-major, in [0,1]

  NormalizedRaw() = default;
  NormalizedRaw(int w, int h, RawMeta m)
      : width(w), height(h), meta(m), samples(std::size_t(w) * std::size_t(h), 0.0) {}

  double& at(int x, int y) { return samples[std::size_t(y) * width + x]; }
  double at(int x, int y) const { return samples[std::size_t(y) * width + x]; }
};

// Four quarter-resolution planes in (r, g_r, g_b, b) order.
template <class T>
struct PlaneStack {
  int width = 0;   // per plane
  int height = 0;  // per plane
  std::array<std::vector<T>, 4> planes;

  PlaneStack() = default;
  PlaneStack(int w, int h) : width(w), height(h) {
    for (auto& p : planes) p.assign(std::size_t(w) * std::size_t(h), T{});
  }

  T& at(int c, int x, int y) { return planes[c][std::size_t(y) * width + x]; }
  const T& at(int c, int x, int y) const { return planes[c][std::size_t(y) * width + x]; }
  T& at(BayerChannel c, int x, int y) { return at(int(c), x, y); }
  const T& at(BayerChannel c, int x, int y) const { return at(int(c), x, y); }

  friend bool operator==(const PlaneStack&, const PlaneStack&) = default;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::array<std::vector<double>, 3> planes;  // R, G, B

  RgbImage() = default;
  RgbImage(int w, int h, double fill = 0.0) : width(w), height(h) {
    for (auto& p : planes) p.assign(std::size_t(w) * std::size_t(h), fill);
  }

  std::size_t pixel_count() const { return std::size_t(width) * std::size_t(height); }
  double& at(int c, int x, int y) { return planes[c][std::size_t(y) * width + x]; }
  double at(int c, int x, int y) const { return planes[c][std::size_t(y) * width + x]; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

inline double luma601(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

}  // namespace rhoraw

#endif  // RHORAW_IMAGE_HPP_
