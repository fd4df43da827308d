#ifndef RHORAW_RIC_CODEC_HPP_
#define RHORAW_RIC_CODEC_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rhoraw/error.hpp"
#include "rhoraw/image.hpp"
#include "rhoraw/ric/context_model.hpp"
#include "rhoraw/ric/pyramid.hpp"

// Lossless RAW codec. Stream layout, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "RIC1"
//   4       1     version (1)
//   5       1     CFA pattern code
//   6       1     bit depth
//   7       1     profile (0 static, 1 fitted)
//   8       4     mosaic width
//   12      4     mosaic height
//   16      2     black level
//   18      2     saturation level
//   20      4     context model length L (0 for the static profile)
//   24      L     context model (varints, see ContextModel::serialize)
//   24+L    20    byte size of sections 0..4
//   44+L    20    CRC-32 of sections 0..4
//   64+L          sections 0..4 back to back
//
// Section 0 holds the coarsest level x_0; section i holds the three new
// samples per 2x2 group of level i. Each section is an independent range
// coder stream, so a stream cut after section i still yields levels 0..i.
namespace rhoraw::ric {

inline constexpr std::uint8_t kVersion = 1;

enum class DecodeErrorKind { BadMagic, BadVersion, BadHeader, Truncated, ChecksumMismatch, Desync };

std::string_view to_string(DecodeErrorKind k);

class DecodeError : public FormatError {
 public:
  DecodeError(DecodeErrorKind kind, int scale, const std::string& what)
      : FormatError(what), kind_(kind), scale_(scale) {}
  DecodeErrorKind kind() const { return kind_; }
  // Section that failed, or -1 for header errors.
  int scale() const { return scale_; }

 private:
  DecodeErrorKind kind_;
  int scale_;
};

struct RicHeader {
  std::uint8_t version = kVersion;
  RawMeta meta;
  Profile profile = Profile::Fitted;
  int width = 0;   // mosaic, before padding
  int height = 0;
  std::vector<std::uint8_t> context;
  std::array<std::uint32_t, kLevels> section_size{};
  std::array<std::uint32_t, kLevels> section_crc{};
  std::size_t payload_offset = 0;

  int plane_width() const { return width / 2; }
  int plane_height() const { return height / 2; }
};

struct EncodeOptions {
  Profile profile = Profile::Fitted;
  bool cross_channel = true;
  unsigned threads = 1;  // context fitting only; the stream does not depend on it
};

struct EncodeResult {
  std::vector<std::uint8_t> bytes;
  std::size_t header_bytes = 0;
  std::array<std::size_t, kLevels> section_bytes{};
  double model_bits = 0.0;  // ideal code length of all payload symbols under the coding model

  std::size_t payload_bits() const;
  double bpp(int pixels) const { return 8.0 * double(bytes.size()) / pixels; }
};

// Mosaic dimensions must be even; planes are mirror-padded to multiples of
// 16 internally. Throws CorruptInput if a sample lies outside
// [black_lev, saturation_lev].
EncodeResult encode(const BayerRaw& x, const EncodeOptions& opt = {});

// Symbol planes (sample - black level), padded, of a raw image.
Planes symbol_planes(const BayerRaw& x);
ContextModel model_for(const Pyramid& symbols, int s, const EncodeOptions& opt);

RicHeader parse_header(std::span<const std::uint8_t> bytes);

struct ProgressiveDecode {
  RicHeader header;
  std::vector<Planes> levels;  // sample codes; levels[i] is pyramid level i
  std::optional<DecodeError> error;
};

// Decodes levels 0..max_scale, stopping at the first damaged or missing
// section. Header errors are thrown.
ProgressiveDecode decode_progressive(std::span<const std::uint8_t> bytes, int max_scale = kLevels - 1);

// Full decode; throws DecodeError on any failure.
BayerRaw decode(std::span<const std::uint8_t> bytes);
// Pyramid level `scale` (sample codes, padded planes); throws DecodeError.
Planes decode_preview(std::span<const std::uint8_t> bytes, int scale);

struct EntropyReport {
  std::array<double, kLevels> section_bits{};
  double total_bits = 0.0;
  double bpp = 0.0;
};

// Mean code length -log2 P over every coded symbol under the integer coding
// model, including the adaptive x_0 model, per full-resolution pixel.
EntropyReport entropy_loss(const Pyramid& symbols, const ContextModel& model, int s);

// Pyramid of sample codes, as the encoder builds it.
Pyramid encoder_pyramid(const BayerRaw& x);

}  // namespace rhoraw::ric

#endif  // RHORAW_RIC_CODEC_HPP_
