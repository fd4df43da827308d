#include "rhoraw/ric/codec.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>

#include "rhoraw/raw.hpp"
#include "rhoraw/ric/range_coder.hpp"
#include "rhoraw/ric/sigmoid.hpp"

namespace rhoraw::ric {

std::string_view to_string(DecodeErrorKind k) {
  switch (k) {
    case DecodeErrorKind::BadMagic: return "bad-magic";
    case DecodeErrorKind::BadVersion: return "bad-version";
    case DecodeErrorKind::BadHeader: return "bad-header";
    case DecodeErrorKind::Truncated: return "truncated";
    case DecodeErrorKind::ChecksumMismatch: return "checksum-mismatch";
    case DecodeErrorKind::Desync: return "desync";
  }
  return "unknown";
}

std::size_t EncodeResult::payload_bits() const {
  std::size_t n = 0;
  for (auto b : section_bytes) n += b;
  return 8 * n;
}

namespace {

constexpr std::size_t kFixedHeader = 24;
constexpr std::size_t kSectionTable = 8 * kLevels;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

std::uint16_t get_u16(const std::uint8_t* p) { return std::uint16_t(p[0] | (p[1] << 8)); }

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

std::uint32_t crc_of(std::span<const std::uint8_t> b) {
  return std::uint32_t(crc32(crc32(0L, Z_NULL, 0), b.data(), uInt(b.size())));
}

Planes add_black(const Planes& sym, int black) {
  Planes out = sym;
  for (auto& p : out.planes)
    for (auto& v : p) v = std::uint16_t(v + black);
  return out;
}

std::vector<std::uint8_t> encode_x0(const Planes& x0, int s) {
  RangeEncoder enc;
  BitTreeModel model(symbol_bits(s));
  for (int c = 0; c < 4; ++c)
    for (auto v : x0.planes[c]) model.encode(enc, v);
  return enc.finish();
}

std::vector<std::uint8_t> encode_scale(const Pyramid& sym, const ContextModel& cm, int scale, int s) {
  RangeEncoder enc;
  SymbolModel sm(SigmoidTable::standard(), s);
  const Planes& cur = sym.levels[scale];
  traverse_scale(sym.levels[scale - 1], [&](int pos, int slot, int ch, int x, int y, std::int64_t u,
                                             const std::int64_t* d) -> std::int64_t {
    const ModelParams& m = cm.at(scale, pos, slot);
    sm.set(m, predict_q16(m, u, d, s));
    const int v = cur.at(ch, x, y);
    sm.encode(enc, v);
    return v;
  });
  return enc.finish();
}

// Upper-left samples of level `scale` come straight from the parent.
Planes seed_level(const Planes& parent) {
  Planes cur(parent.width * 2, parent.height * 2);
  for (int c = 0; c < 4; ++c)
    for (int y = 0; y < parent.height; ++y)
      for (int x = 0; x < parent.width; ++x) cur.at(c, 2 * x, 2 * y) = parent.at(c, x, y);
  return cur;
}

}  // namespace

Planes symbol_planes(const BayerRaw& x) {
  x.validate();
  const int black = x.meta.black_lev, sat = x.meta.saturation_lev;
  for (auto v : x.samples)
    if (v < black || v > sat)
      throw CorruptInput("sample " + std::to_string(v) + " outside [" + std::to_string(black) + ", " +
                         std::to_string(sat) + "]");
  Planes p = stack(x);
  for (auto& plane : p.planes)
    for (auto& v : plane) v = std::uint16_t(v - black);
  return pad_planes(p);
}

Pyramid encoder_pyramid(const BayerRaw& x) {
  Pyramid p = build_pyramid(symbol_planes(x));
  for (auto& level : p.levels) level = add_black(level, x.meta.black_lev);
  return p;
}

ContextModel model_for(const Pyramid& symbols, int s, const EncodeOptions& opt) {
  if (opt.profile == Profile::Static) return ContextModel::static_profile();
  FitOptions fo;
  fo.cross_channel = opt.cross_channel;
  fo.threads = opt.threads;
  return fit_context(symbols, s, fo);
}

EncodeResult encode(const BayerRaw& x, const EncodeOptions& opt) {
  const int s = x.meta.span();
  const Pyramid sym = build_pyramid(symbol_planes(x));
  const ContextModel cm = model_for(sym, s, opt);
  const auto ctx = cm.serialize();

  std::array<std::vector<std::uint8_t>, kLevels> sections;
  sections[0] = encode_x0(sym.levels[0], s);
  for (int scale = 1; scale < kLevels; ++scale) sections[scale] = encode_scale(sym, cm, scale, s);

  EncodeResult res;
  auto& out = res.bytes;
  for (char ch : {'R', 'I', 'C', '1'}) out.push_back(std::uint8_t(ch));
  out.push_back(kVersion);
  out.push_back(std::uint8_t(x.meta.pattern));
  out.push_back(std::uint8_t(x.meta.bit_depth));
  out.push_back(std::uint8_t(cm.profile));
  put_u32(out, std::uint32_t(x.width));
  put_u32(out, std::uint32_t(x.height));
  put_u16(out, x.meta.black_lev);
  put_u16(out, x.meta.saturation_lev);
  put_u32(out, std::uint32_t(ctx.size()));
  out.insert(out.end(), ctx.begin(), ctx.end());
  for (const auto& sec : sections) put_u32(out, std::uint32_t(sec.size()));
  for (const auto& sec : sections) put_u32(out, crc_of(sec));
  res.header_bytes = out.size();
  for (int i = 0; i < kLevels; ++i) {
    res.section_bytes[i] = sections[i].size();
    out.insert(out.end(), sections[i].begin(), sections[i].end());
  }
  res.model_bits = entropy_loss(sym, cm, s).total_bits;
  return res;
}

RicHeader parse_header(std::span<const std::uint8_t> b) {
  auto fail = [](DecodeErrorKind k, const std::string& msg) { return DecodeError(k, -1, "ric: " + msg); };
  if (b.size() < 4 || std::memcmp(b.data(), "RIC1", 4) != 0) throw fail(DecodeErrorKind::BadMagic, "bad magic");
  if (b.size() < kFixedHeader) throw fail(DecodeErrorKind::Truncated, "truncated header");
  RicHeader h;
  h.version = b[4];
  if (h.version != kVersion) throw fail(DecodeErrorKind::BadVersion, "unsupported version " + std::to_string(h.version));
  if (b[5] > 4) throw fail(DecodeErrorKind::BadHeader, "bad CFA pattern");
  h.meta.pattern = CfaPattern(b[5]);
  h.meta.bit_depth = b[6];
  if (b[7] > 1) throw fail(DecodeErrorKind::BadHeader, "bad profile");
  h.profile = Profile(b[7]);
  h.width = int(get_u32(b.data() + 8));
  h.height = int(get_u32(b.data() + 12));
  h.meta.black_lev = get_u16(b.data() + 16);
  h.meta.saturation_lev = get_u16(b.data() + 18);
  try {
    h.meta.validate();
  } catch (const Error& e) {
    throw fail(DecodeErrorKind::BadHeader, e.what());
  }
  if (h.width <= 0 || h.height <= 0 || h.width % 2 || h.height % 2 || h.width > (1 << 16) || h.height > (1 << 16))
    throw fail(DecodeErrorKind::BadHeader, "bad dimensions");
  const std::uint32_t ctx_len = get_u32(b.data() + 20);
  if (h.profile == Profile::Static && ctx_len != 0) throw fail(DecodeErrorKind::BadHeader, "static profile with context");
  if (b.size() < kFixedHeader + std::size_t(ctx_len) + kSectionTable)
    throw fail(DecodeErrorKind::Truncated, "truncated header");
  h.context.assign(b.begin() + kFixedHeader, b.begin() + kFixedHeader + ctx_len);
  const std::uint8_t* t = b.data() + kFixedHeader + ctx_len;
  for (int i = 0; i < kLevels; ++i) {
    h.section_size[i] = get_u32(t + 4 * i);
    h.section_crc[i] = get_u32(t + 4 * (kLevels + i));
  }
  h.payload_offset = kFixedHeader + ctx_len + kSectionTable;
  return h;
}

ProgressiveDecode decode_progressive(std::span<const std::uint8_t> bytes, int max_scale) {
  if (max_scale < 0 || max_scale >= kLevels) throw InvalidParams("scale must lie in 0..4");
  ProgressiveDecode out;
  out.header = parse_header(bytes);
  const RicHeader& h = out.header;
  ContextModel cm;
  try {
    cm = h.profile == Profile::Static ? ContextModel::static_profile() : ContextModel::deserialize(h.context);
  } catch (const FormatError& e) {
    throw DecodeError(DecodeErrorKind::BadHeader, -1, std::string("ric: ") + e.what());
  }
  const int s = h.meta.span();
  const int black = h.meta.black_lev;
  const int pw = (h.plane_width() + kPlaneMultiple - 1) / kPlaneMultiple * kPlaneMultiple;
  const int ph = (h.plane_height() + kPlaneMultiple - 1) / kPlaneMultiple * kPlaneMultiple;

  std::vector<Planes> sym;
  std::size_t offset = h.payload_offset;
  for (int scale = 0; scale <= max_scale; ++scale) {
    const std::size_t size = h.section_size[scale];
    if (bytes.size() < offset || bytes.size() - offset < size) {
      out.error = DecodeError(DecodeErrorKind::Truncated, scale, "ric: section " + std::to_string(scale) + " truncated");
      break;
    }
    const auto section = bytes.subspan(offset, size);
    offset += size;
    if (crc_of(section) != h.section_crc[scale]) {
      out.error = DecodeError(DecodeErrorKind::ChecksumMismatch, scale,
                              "ric: section " + std::to_string(scale) + " checksum mismatch");
      break;
    }
    RangeDecoder dec(section);
    bool bad_symbol = false;
    if (scale == 0) {
      Planes x0(pw >> (kLevels - 1), ph >> (kLevels - 1));
      BitTreeModel model(symbol_bits(s));
      for (int c = 0; c < 4; ++c)
        for (auto& v : x0.planes[c]) {
          const int value = model.decode(dec);
          if (value > s) bad_symbol = true;
          v = std::uint16_t(std::min(value, s));
        }
      sym.push_back(std::move(x0));
    } else {
      Planes cur = seed_level(sym.back());
      SymbolModel sm(SigmoidTable::standard(), s);
      traverse_scale(sym.back(), [&](int pos, int slot, int ch, int x, int y, std::int64_t u,
                                     const std::int64_t* d) -> std::int64_t {
        const ModelParams& m = cm.at(scale, pos, slot);
        sm.set(m, predict_q16(m, u, d, s));
        const int v = sm.decode(dec);
        cur.at(ch, x, y) = std::uint16_t(v);
        return v;
      });
      sym.push_back(std::move(cur));
    }
    // The encoder's final flush is four bytes; reading further means the
    // decoder lost sync with the stream.
    if (bad_symbol || dec.overrun() > 0) {
      sym.pop_back();
      out.error = DecodeError(DecodeErrorKind::Desync, scale, "ric: section " + std::to_string(scale) + " desync");
      break;
    }
  }
  for (const auto& level : sym) out.levels.push_back(add_black(level, black));
  return out;
}

BayerRaw decode(std::span<const std::uint8_t> bytes) {
  auto pd = decode_progressive(bytes, kLevels - 1);
  if (pd.error) throw *pd.error;
  const RicHeader& h = pd.header;
  const Planes planes = crop_planes(pd.levels.back(), h.plane_width(), h.plane_height());
  return unstack(planes, h.meta);
}

Planes decode_preview(std::span<const std::uint8_t> bytes, int scale) {
  auto pd = decode_progressive(bytes, scale);
  if (pd.error) throw *pd.error;
  return std::move(pd.levels.back());
}

EntropyReport entropy_loss(const Pyramid& sym, const ContextModel& cm, int s) {
  EntropyReport r;
  BitTreeModel tree(symbol_bits(s));
  for (int c = 0; c < 4; ++c)
    for (auto v : sym.levels[0].planes[c]) r.section_bits[0] += tree.cost_and_update(v);
  SymbolModel sm(SigmoidTable::standard(), s);
  for (int scale = 1; scale < kLevels; ++scale) {
    const Planes& cur = sym.levels[scale];
    double bits = 0.0;
    traverse_scale(sym.levels[scale - 1], [&](int pos, int slot, int ch, int x, int y, std::int64_t u,
                                               const std::int64_t* d) -> std::int64_t {
      const ModelParams& m = cm.at(scale, pos, slot);
      sm.set(m, predict_q16(m, u, d, s));
      const int v = cur.at(ch, x, y);
      bits += sm.cost_bits(v);
      return v;
    });
    r.section_bits[scale] = bits;
  }
  for (double b : r.section_bits) r.total_bits += b;
  const Planes& full = sym.levels[kLevels - 1];
  r.bpp = r.total_bits / (4.0 * full.width * full.height);
  return r;
}

}  // namespace rhoraw::ric
