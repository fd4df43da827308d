#ifndef RHORAW_IO_HPP_
#define RHORAW_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rhoraw/image.hpp"

namespace rhoraw::io {

// .braw layout, all integers little-endian:
//   "BRAW" | version u8 (=1) | pattern u8 | bit_depth u8 | reserved u8 |
//   width u32 | height u32 | black_lev u16 | saturation_lev u16 |
//   width*height samples u16
inline constexpr std::uint8_t kBrawVersion = 1;
inline constexpr std::size_t kBrawHeaderSize = 20;

std::vector<std::uint8_t> encode_braw(const BayerRaw& raw);
BayerRaw decode_braw(std::span<const std::uint8_t> bytes);

void write_braw(const std::filesystem::path& path, const BayerRaw& raw);
BayerRaw read_braw(const std::filesystem::path& path);

// Binary PPM (P6). Written with maxval 65535 (big-endian samples); any maxval
// up to 65535 is accepted on read. Values map to [0,1] by maxval.
std::vector<std::uint8_t> encode_ppm(const RgbImage& img);
RgbImage decode_ppm(std::span<const std::uint8_t> bytes);

void write_ppm(const std::filesystem::path& path, const RgbImage& img);
RgbImage read_ppm(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace rhoraw::io

#endif  // RHORAW_IO_HPP_
