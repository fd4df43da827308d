#include "rhoraw/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "rhoraw/error.hpp"

namespace rhoraw::io {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(std::uint8_t(v & 0xff));
  out.push_back(std::uint8_t(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

std::uint16_t get_u16(const std::uint8_t* p) { return std::uint16_t(p[0] | (p[1] << 8)); }

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_braw(const BayerRaw& raw) {
  raw.validate();
  std::vector<std::uint8_t> out;
  out.reserve(kBrawHeaderSize + raw.samples.size() * 2);
  for (char ch : {'B', 'R', 'A', 'W'}) out.push_back(std::uint8_t(ch));
  out.push_back(kBrawVersion);
  out.push_back(std::uint8_t(raw.meta.pattern));
  out.push_back(std::uint8_t(raw.meta.bit_depth));
  out.push_back(0);
  put_u32(out, std::uint32_t(raw.width));
  put_u32(out, std::uint32_t(raw.height));
  put_u16(out, raw.meta.black_lev);
  put_u16(out, raw.meta.saturation_lev);
  for (auto s : raw.samples) put_u16(out, s);
  return out;
}

BayerRaw decode_braw(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kBrawHeaderSize) throw FormatError("braw: truncated header");
  if (std::memcmp(bytes.data(), "BRAW", 4) != 0) throw FormatError("braw: bad magic");
  if (bytes[4] != kBrawVersion)
    throw FormatError("braw: unsupported version " + std::to_string(bytes[4]));
  if (bytes[5] > 4) throw FormatError("braw: unknown pattern code");
  RawMeta meta;
  meta.pattern = CfaPattern(bytes[5]);
  meta.bit_depth = bytes[6];
  const std::uint32_t w = get_u32(&bytes[8]);
  const std::uint32_t h = get_u32(&bytes[12]);
  meta.black_lev = get_u16(&bytes[16]);
  meta.saturation_lev = get_u16(&bytes[18]);
  meta.validate();
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
    throw FormatError("braw: implausible dimensions");
  const std::size_t n = std::size_t(w) * h;
  if (bytes.size() != kBrawHeaderSize + 2 * n) throw FormatError("braw: payload size mismatch");
  BayerRaw raw(int(w), int(h), meta);
  const std::uint8_t* p = bytes.data() + kBrawHeaderSize;
  for (std::size_t i = 0; i < n; ++i) raw.samples[i] = get_u16(p + 2 * i);
  raw.validate();
  return raw;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n65535\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.pixel_count() * 6);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double v = std::clamp(img.planes[c][i], 0.0, 1.0);
      const auto q = std::uint16_t(std::lround(v * 65535.0));
      out.push_back(std::uint8_t(q >> 8));
      out.push_back(std::uint8_t(q & 0xff));
    }
  }
  return out;
}

RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_ws();
    long v = 0;
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    if (pos == start || v > (1L << 24)) throw FormatError("ppm: malformed header");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw FormatError("ppm: expected P6");
  pos = 2;
  const long w = read_int(), h = read_int(), maxval = read_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw FormatError("ppm: bad header values");
  ++pos;  // single whitespace before raster
  const int bps = maxval < 256 ? 1 : 2;
  const std::size_t need = std::size_t(w) * h * 3 * bps;
  if (bytes.size() < pos + need) throw FormatError("ppm: truncated raster");
  RgbImage img{int(w), int(h)};
  const std::uint8_t* p = bytes.data() + pos;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) {
      unsigned v = bps == 1 ? p[0] : (unsigned(p[0]) << 8) | p[1];
      p += bps;
      img.planes[c][i] = double(v) / double(maxval);
    }
  }
  return img;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

void write_braw(const std::filesystem::path& path, const BayerRaw& raw) {
  write_file(path, encode_braw(raw));
}

BayerRaw read_braw(const std::filesystem::path& path) { return decode_braw(read_file(path)); }

void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
  write_file(path, encode_ppm(img));
}

RgbImage read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }

}  // namespace rhoraw::io
