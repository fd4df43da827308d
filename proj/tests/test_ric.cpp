#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "rhoraw/error.hpp"
#include "rhoraw/random.hpp"
#include "rhoraw/raw.hpp"
#include "rhoraw/ric/codec.hpp"
#include "rhoraw/ric/logistic.hpp"
#include "rhoraw/ric/range_coder.hpp"
#include "rhoraw/synth.hpp"

using namespace rhoraw;
using namespace rhoraw::ric;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Planes random_planes(int w, int h, int maxv, std::uint64_t seed) {
  Planes p(w, h);
  Rng rng(seed);
  for (auto& plane : p.planes)
    for (auto& v : plane) v = std::uint16_t(rng.next() % std::uint64_t(maxv + 1));
  return p;
}

// Full-resolution planes whose every refinement equals the clamped bilinear
// estimate from its parent exactly. Level-0 values are multiples of 256, so
// each halving step stays integral.
Planes bilinear_planes(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Planes cur(w >> 4, h >> 4);
  for (auto& plane : cur.planes)
    for (auto& v : plane) v = std::uint16_t(256 * (rng.next() % 15));
  for (int level = 1; level < kLevels; ++level) {
    Planes next(cur.width * 2, cur.height * 2);
    for (int c = 0; c < 4; ++c)
      for (int gy = 0; gy < cur.height; ++gy)
        for (int gx = 0; gx < cur.width; ++gx) {
          const int gx1 = std::min(gx + 1, cur.width - 1), gy1 = std::min(gy + 1, cur.height - 1);
          const int a = cur.at(c, gx, gy), b = cur.at(c, gx1, gy), cc = cur.at(c, gx, gy1), d = cur.at(c, gx1, gy1);
          next.at(c, 2 * gx, 2 * gy) = std::uint16_t(a);
          next.at(c, 2 * gx + 1, 2 * gy) = std::uint16_t((a + b) / 2);
          next.at(c, 2 * gx, 2 * gy + 1) = std::uint16_t((a + cc) / 2);
          next.at(c, 2 * gx + 1, 2 * gy + 1) = std::uint16_t((a + b + cc + d) / 4);
        }
    cur = std::move(next);
  }
  return cur;
}

BayerRaw raw_from_planes(const Planes& p, const RawMeta& m) {
  Planes shifted = p;
  for (auto& plane : shifted.planes)
    for (auto& v : plane) v = std::uint16_t(v + m.black_lev);
  return unstack(shifted, m);
}

// Each 2x2 quad shares one random value; channels differ by small noise.
BayerRaw correlated_raw(int w, int h, const RawMeta& m, std::uint64_t seed) {
  Rng rng(seed);
  BayerRaw x(w, h, m);
  for (int y = 0; y < h; y += 2)
    for (int q = 0; q < w; q += 2) {
      const double base = rng.uniform(0.1, 0.9) * m.span();
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const double v = base + rng.normal(0.0, 2.0);
          x.at(q + dx, y + dy) = std::uint16_t(std::lround(std::clamp(v, 0.0, double(m.span()))) + m.black_lev);
        }
    }
  return x;
}

bool levels_equal(const std::vector<Planes>& got, const Pyramid& want, std::size_t n) {
  if (got.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (!(got[i] == want.levels[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("pyramid keeps the upper-left sample") {
  const auto x = random_planes(32, 32, 4095, 1);
  const auto p = build_pyramid(x);
  CHECK(p.levels[4] == x);
  for (int i = 0; i < kLevels; ++i) {
    CHECK(p.levels[i].width == 32 >> (4 - i));
    const int step = 1 << (4 - i);
    for (int c = 0; c < 4; ++c)
      for (int y = 0; y < p.levels[i].height; ++y)
        for (int q = 0; q < p.levels[i].width; ++q) CHECK(p.levels[i].at(c, q, y) == x.at(c, q * step, y * step));
  }

  Planes ramp(16, 16);
  for (int c = 0; c < 4; ++c)
    for (int y = 0; y < 16; ++y)
      for (int q = 0; q < 16; ++q) ramp.at(c, q, y) = std::uint16_t(100 + q + 16 * y + c);
  const auto pr = build_pyramid(ramp);
  CHECK(pr.levels[0].width == 1);
  for (int c = 0; c < 4; ++c) CHECK(pr.levels[0].at(c, 0, 0) == 100 + c);

  Planes flat(32, 16);
  for (auto& plane : flat.planes) std::fill(plane.begin(), plane.end(), 77);
  for (const auto& level : build_pyramid(flat).levels)
    for (const auto& plane : level.planes)
      for (auto v : plane) CHECK(v == 77);

  CHECK_THROWS_AS(build_pyramid(random_planes(24, 32, 10, 2)), DimensionError);
}

TEST_CASE("padding reflects and crops back") {
  const auto x = random_planes(5, 3, 1000, 3);
  const auto p = pad_planes(x);
  REQUIRE(p.width == 16);
  REQUIRE(p.height == 16);
  CHECK(p.at(0, 5, 0) == x.at(0, 3, 0));
  CHECK(p.at(1, 6, 1) == x.at(1, 2, 1));
  CHECK(p.at(2, 0, 3) == x.at(2, 0, 1));
  CHECK(p.at(3, 4, 4) == x.at(3, 4, 0));
  CHECK(crop_planes(p, 5, 3) == x);
  CHECK(pad_planes(random_planes(16, 32, 9, 1)) == random_planes(16, 32, 9, 1));
}

TEST_CASE("logistic pmf") {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const int s = t % 2 ? 255 : 1023;
    const double mu = rng.uniform(-0.2, 1.2);
    const double sigma = std::exp(rng.uniform(std::log(1e-3), std::log(0.5)));
    double sum = 0.0;
    for (int j = 0; j <= s; ++j) {
      const double p = logistic_pmf(j, mu, sigma, s);
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  // Symmetric about a centred symbol.
  const int s = 255, c = 100;
  for (int j = 1; j < 50; ++j)
    CHECK(logistic_pmf(c - j, double(c) / s, 0.05, s) == doctest::Approx(logistic_pmf(c + j, double(c) / s, 0.05, s)));

  const double want = sig((128.0 / 255 - 0.5 + 1.0 / 510) / 0.1) - sig((128.0 / 255 - 0.5 - 1.0 / 510) / 0.1);
  CHECK(logistic_pmf(128, 0.5, 0.1, 255) == doctest::Approx(want).epsilon(1e-12));
  // Tails land in the end symbols.
  CHECK(logistic_pmf(0, -5.0, 0.01, 255) == doctest::Approx(1.0));
  CHECK(logistic_pmf(255, 5.0, 0.01, 255) == doctest::Approx(1.0));

  CHECK_THROWS_AS(logistic_pmf(256, 0.5, 0.1, 255), InvalidParams);
  CHECK_THROWS_AS(logistic_pmf(3, 0.5, 1e-4, 255), InvalidParams);
}

TEST_CASE("mixture pmf and the cross-channel chain") {
  LogisticMixture m;
  m.s = 255;
  for (auto& ch : m.channels) ch = {{0.3, 0.4, 0.05}, {0.7, 0.6, 0.1}};
  PartialGroup none;
  PartialGroup all{0.2, 0.3, 0.4};
  // With no coefficients the channels are independent.
  for (int j = 0; j <= 255; j += 17) {
    const double plain = 0.3 * logistic_pmf(j, 0.4, 0.05, 255) + 0.7 * logistic_pmf(j, 0.6, 0.1, 255);
    CHECK(mixture_pmf(j, m, BayerChannel::B, all) == doctest::Approx(plain));
    CHECK(mixture_pmf(j, m, BayerChannel::Gr, none) == doctest::Approx(plain));
  }

  LogisticMixture one;
  one.s = 255;
  for (auto& ch : one.channels) ch = {{1.0, 0.25, 0.02}};
  one.alpha = {1.0};
  const auto mu = tilde_mu(one, BayerChannel::Gb, PartialGroup{10.0 / 255, {}, {}});
  CHECK(mu[0] == doctest::Approx(0.25 + 10.0 / 255).epsilon(1e-15));

  m.alpha = {0.1, 0.2};
  m.beta = {0.3, -0.1};
  m.gamma = {0.2, 0.2};
  m.delta = {0.1, 0.0};
  m.epsilon = {-0.2, 0.1};
  m.zeta = {0.5, 0.4};
  const auto mb = tilde_mu(m, BayerChannel::B, all);
  CHECK(mb[0] == doctest::Approx(0.4 + 0.1 * 0.2 - 0.2 * 0.3 + 0.5 * 0.4));
  CHECK(mb[1] == doctest::Approx(0.6 + 0.0 * 0.2 + 0.1 * 0.3 + 0.4 * 0.4));
  for (auto ch : {BayerChannel::Gr, BayerChannel::Gb, BayerChannel::R, BayerChannel::B}) {
    double sum = 0.0;
    for (int j = 0; j <= 255; ++j) sum += mixture_pmf(j, m, ch, all);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }

  CHECK_THROWS_AS(tilde_mu(m, BayerChannel::Gb, none), OrderingViolation);
  CHECK_THROWS_AS(tilde_mu(m, BayerChannel::R, PartialGroup{0.1, {}, {}}), OrderingViolation);
  CHECK_THROWS_AS(tilde_mu(m, BayerChannel::B, PartialGroup{0.1, 0.2, {}}), OrderingViolation);
  CHECK_NOTHROW(tilde_mu(m, BayerChannel::Gr, none));
}

TEST_CASE("portable sigmoid table") {
  for (double x = -30; x <= 30; x += 0.37) CHECK(portable_exp(x) == doctest::Approx(std::exp(x)).epsilon(1e-13));
  const auto& t = SigmoidTable::standard();
  CHECK(t.lookup(0) == SigmoidTable::kOne / 2);
  std::int64_t prev = -1;
  for (std::int64_t z = -(20 << 16); z <= (20 << 16); z += 977) {
    const auto v = t.lookup(z);
    CHECK(v >= prev);
    prev = v;
    CHECK(std::abs(t.lookup(z) + t.lookup(-z) - SigmoidTable::kOne) <= 1);
    CHECK(std::abs(double(v) / SigmoidTable::kOne - sig(double(z) / 65536)) < 2e-5);
  }
}

TEST_CASE("range coder round trip") {
  Rng rng(5);
  std::vector<std::array<std::uint32_t, 3>> syms;
  RangeEncoder enc;
  for (int i = 0; i < 20000; ++i) {
    const std::uint32_t total = 1 + std::uint32_t(rng.next() % kMaxTotal);
    const std::uint32_t cum = std::uint32_t(rng.next() % total);
    const std::uint32_t freq = 1 + std::uint32_t(rng.next() % (total - cum));
    syms.push_back({cum, freq, total});
    enc.encode(cum, freq, total);
  }
  const auto bytes = enc.finish();
  RangeDecoder dec(bytes);
  for (const auto& [cum, freq, total] : syms) {
    const auto t = dec.target(total);
    REQUIRE(t >= cum);
    REQUIRE(t < cum + freq);
    dec.decode(cum, freq);
  }
  CHECK(dec.overrun() == 0);

  RangeEncoder bad;
  CHECK_THROWS(bad.encode(5, 0, 10));
  CHECK_THROWS(bad.encode(5, 6, 10));
  CHECK_THROWS(bad.encode(0, 1, kMaxTotal + 1));
}

TEST_CASE("integer symbol model") {
  const auto& table = SigmoidTable::standard();
  Rng rng(12);
  for (int s : {15, 255, 1023, 4095, 16383}) {
    SymbolModel sm(table, s);
    for (int t = 0; t < 6; ++t) {
      ModelParams m;
      const int k = 1 + int(rng.next() % 4);
      std::int32_t left = kWeightTotal;
      for (int c = 0; c < k; ++c) {
        ComponentQ q;
        q.offset_q16 = std::int32_t(rng.uniform(-20, 20) * kQ16);
        q.sigma_q16 = std::int32_t(std::exp(rng.uniform(std::log(66.0), std::log(200.0 * kQ16))));
        q.weight_q15 = c + 1 == k ? left : std::max(1, int(left * rng.uniform(0.2, 0.8)));
        left -= q.weight_q15;
        m.components.push_back(q);
      }
      m.finalize();
      const std::int64_t mu = std::int64_t(rng.uniform(0, s) * kQ16);
      sm.set(m, mu);
      CHECK(sm.cdf(0) == 0);
      CHECK(sm.cdf(s + 1) == SymbolModel::kCdfOne);
      for (int j = 1; j <= s + 1; ++j) CHECK(sm.cdf(j) >= sm.cdf(j - 1));

      // Every symbol is decodable and the code lengths form a complete code.
      double kraft = 0.0;
      RangeEncoder enc;
      std::vector<int> order;
      for (int j = 0; j <= s; j += std::max(1, s / 300)) order.push_back(j);
      for (int j = 0; j <= s; ++j) kraft += std::exp2(-sm.cost_bits(j));
      CHECK(std::abs(kraft - 1.0) < 1e-9);
      for (int j : order) sm.encode(enc, j);
      const auto bytes = enc.finish();
      RangeDecoder dec(bytes);
      for (int j : order) CHECK(sm.decode(dec) == j);
    }
  }
}

TEST_CASE("bit tree model") {
  Rng rng(3);
  std::vector<int> values;
  for (int i = 0; i < 500; ++i) values.push_back(int(rng.next() % 1024));
  BitTreeModel a(10), b(10), c(10);
  RangeEncoder enc;
  double bits = 0.0;
  for (int v : values) {
    a.encode(enc, v);
    bits += c.cost_and_update(v);
  }
  const auto bytes = enc.finish();
  RangeDecoder dec(bytes);
  for (int v : values) CHECK(b.decode(dec) == v);
  CHECK(8.0 * bytes.size() >= bits);
  CHECK(8.0 * bytes.size() <= bits + 64);
}

TEST_CASE("context model serialization") {
  const auto raw = synth::smooth_raw(96, 64, RawMeta{CfaPattern::RGGB, 12, 64, 4095}, 3);
  const auto pyr = build_pyramid(symbol_planes(raw));
  const auto cm = fit_context(pyr, raw.meta.span());
  const auto bytes = cm.serialize();
  CHECK(ContextModel::deserialize(bytes) == cm);
  for (const auto& m : cm.models) {
    std::int32_t total = 0;
    CHECK(m.components.size() >= 1);
    CHECK(m.components.size() <= std::size_t(kMixtureComponents));
    for (const auto& c : m.components) {
      CHECK(c.sigma_q16 >= kSigmaMinQ16);
      CHECK(c.weight_q15 >= 1);
      total += c.weight_q15;
    }
    CHECK(total == kWeightTotal);
  }

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(ContextModel::deserialize(trailing), FormatError);
  CHECK_THROWS_AS(ContextModel::deserialize(std::span(bytes.data(), bytes.size() / 2)), FormatError);
  CHECK(ContextModel::static_profile().serialize().empty());

  // Refitting is bit-identical, whatever the thread count.
  FitOptions threaded;
  threaded.threads = 6;
  CHECK(fit_context(pyr, raw.meta.span(), threaded) == cm);
}

TEST_CASE("fit on an exactly bilinear image") {
  const auto planes = bilinear_planes(64, 48, 4);
  const auto cm = fit_context(build_pyramid(planes), 4095);
  for (const auto& m : cm.models) {
    CHECK(m.parent_q16 == kQ16);
    CHECK(std::abs(m.bias_q16) <= 4);  // least-squares round-off
    for (auto c : m.cross_q16) CHECK(c == 0);
    REQUIRE(m.components.size() == 1);
    CHECK(m.components[0].sigma_q16 == kSigmaMinQ16);
    CHECK(std::abs(m.bias_q16 + m.components[0].offset_q16) <= 1);
  }
  // Beyond the coarsest level only the floor of one count per symbol in
  // each coding step remains.
  const auto raw = raw_from_planes(planes, RawMeta{CfaPattern::RGGB, 12, 0, 4095});
  const auto rep = entropy_loss(build_pyramid(planes), cm, 4095);
  double refine = 0.0;
  for (int i = 1; i < kLevels; ++i) refine += rep.section_bits[i];
  CHECK(refine < 0.1 * raw.samples.size());
  const auto enc = encode(raw);
  CHECK(decode(enc.bytes) == raw);
}

TEST_CASE("fit on white noise") {
  const int s = 4095;
  const auto cm = fit_context(build_pyramid(random_planes(128, 128, s, 9)), s);
  // The two finest scales have enough samples for a tight estimate.
  for (int i = ContextModel::index(3, 0, 0); i < kModelCount; ++i) {
    const auto& m = cm.models[i];
    CHECK(std::abs(double(m.parent_q16) / kQ16) < 0.1);
    for (auto c : m.cross_q16) CHECK(std::abs(double(c) / kQ16) < 0.1);
    CHECK(double(m.bias_q16) / kQ16 == doctest::Approx(s / 2.0).epsilon(0.08));
  }
}

TEST_CASE("quantized predictor stays within a symbol of the float fit") {
  const RawMeta meta{CfaPattern::RGGB, 12, 0, 4095};
  const auto raw = synth::smooth_raw(256, 256, meta, 21);
  const auto pyr = build_pyramid(symbol_planes(raw));
  const int s = meta.span();
  const auto cm = fit_context(pyr, s);

  for (int scale : {2, 4}) {
    for (int slot = 0; slot < 4; ++slot) {
      const int pos = 2;
      // Gather the training rows of one model.
      std::vector<std::vector<double>> feats;
      std::vector<double> target;
      std::vector<std::int64_t> us;
      std::vector<std::array<std::int64_t, 4>> ds;
      traverse_scale(pyr.levels[scale - 1], [&](int p, int sl, int ch, int x, int y, std::int64_t u,
                                                const std::int64_t* d) -> std::int64_t {
        const std::int64_t v = pyr.levels[scale].at(ch, x, y);
        if (p == pos && sl == slot) {
          std::vector<double> f{1.0, double(u) / 4};
          std::array<std::int64_t, 4> dd{};
          for (int j = 0; j < sl; ++j) {
            f.push_back(double(d[j]) / 4);
            dd[j] = d[j];
          }
          feats.push_back(f);
          target.push_back(double(v));
          us.push_back(u);
          ds.push_back(dd);
        }
        return v;
      });
      Eigen::MatrixXd a(feats.size(), feats[0].size());
      Eigen::VectorXd b(feats.size());
      for (std::size_t i = 0; i < feats.size(); ++i) {
        for (std::size_t j = 0; j < feats[i].size(); ++j) a(i, j) = feats[i][j];
        b(i) = target[i];
      }
      const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(b);
      const auto& m = cm.at(scale, pos, slot);
      double worst = 0.0;
      for (std::size_t i = 0; i < feats.size(); ++i) {
        const double exact = a.row(i).dot(beta);
        const double q = double(predict_q16(m, us[i], ds[i].data(), s)) / kQ16;
        worst = std::max(worst, std::abs(exact - q));
      }
      CHECK(worst < 1.0);
    }
  }
}

TEST_CASE("lossless round trips") {
  const CfaPattern patterns[] = {CfaPattern::RGGB, CfaPattern::RYYB, CfaPattern::BGGR, CfaPattern::GRBG,
                                 CfaPattern::GBRG};
  int i = 0;
  for (int depth : {10, 12, 14}) {
    for (auto pat : patterns) {
      const std::uint16_t black = std::uint16_t(depth == 10 ? 64 : depth == 12 ? 256 : 1024);
      const RawMeta m{pat, depth, black, std::uint16_t((1u << depth) - 1 - (i % 3) * 7)};
      const int w = 64 + 2 * (i % 4) * 5, h = 48 + 2 * (i % 3) * 3;  // some need padding
      const auto raw = i % 2 ? synth::smooth_raw(w, h, m, 100 + i) : synth::noise_raw(w, h, m, 100 + i);
      for (auto profile : {Profile::Fitted, Profile::Static}) {
        EncodeOptions opt;
        opt.profile = profile;
        const auto enc = encode(raw, opt);
        CHECK(decode(enc.bytes) == raw);
      }
      ++i;
    }
  }
}

TEST_CASE("extreme images round trip") {
  for (int depth : {10, 12, 14}) {
    for (auto pat : {CfaPattern::RGGB, CfaPattern::RYYB}) {
      const RawMeta m{pat, depth, 32, std::uint16_t((1u << depth) - 1)};
      for (std::uint16_t v : {m.black_lev, m.saturation_lev}) {
        const auto raw = synth::constant_raw(64, 64, m, v);
        const auto enc = encode(raw);
        CHECK(decode(enc.bytes) == raw);
        // Only the header and the range coder flush bytes remain.
        CHECK(enc.payload_bits() < 0.1 * raw.samples.size());
      }
      // Alternating black and saturated codes.
      auto mix = synth::constant_raw(32, 32, m, m.black_lev);
      for (std::size_t k = 0; k < mix.samples.size(); k += 3) mix.samples[k] = m.saturation_lev;
      CHECK(decode(encode(mix).bytes) == mix);
    }
  }
}

TEST_CASE("out-of-range samples are rejected") {
  const RawMeta m{CfaPattern::RGGB, 12, 64, 4000};
  auto raw = synth::smooth_raw(32, 32, m, 1);
  raw.samples[5] = 63;
  CHECK_THROWS_AS(encode(raw), CorruptInput);
  raw.samples[5] = 4001;
  CHECK_THROWS_AS(encode(raw), CorruptInput);
  raw.samples[5] = 5000;
  CHECK_THROWS_AS(encode(raw), Error);
}

TEST_CASE("header layout") {
  const RawMeta m{CfaPattern::RYYB, 14, 512, 16000};
  const auto raw = synth::smooth_raw(40, 36, m, 2);
  const auto enc = encode(raw);
  const auto& b = enc.bytes;
  CHECK(std::string(b.begin(), b.begin() + 4) == "RIC1");
  CHECK(b[4] == kVersion);
  CHECK(b[5] == 4);
  CHECK(b[6] == 14);
  CHECK(b[7] == 1);
  CHECK((b[16] | b[17] << 8) == 512);
  const auto h = parse_header(b);
  CHECK(h.width == 40);
  CHECK(h.height == 36);
  CHECK(h.meta == m);
  CHECK(h.payload_offset == enc.header_bytes);
  std::size_t total = h.payload_offset;
  for (int i = 0; i < kLevels; ++i) {
    CHECK(h.section_size[i] == enc.section_bytes[i]);
    total += h.section_size[i];
  }
  CHECK(total == b.size());

  EncodeOptions st;
  st.profile = Profile::Static;
  const auto se = encode(raw, st);
  CHECK(parse_header(se.bytes).context.empty());
  CHECK(se.header_bytes == 64);
}

TEST_CASE("previews match the encoder pyramid") {
  const RawMeta m{CfaPattern::RGGB, 12, 128, 4095};
  const auto raw = synth::smooth_raw(120, 88, m, 17);
  const auto enc = encode(raw);
  const auto pyr = encoder_pyramid(raw);
  for (int s = 0; s < kLevels; ++s) CHECK(decode_preview(enc.bytes, s) == pyr.levels[s]);
  const auto full = decode_progressive(enc.bytes);
  CHECK_FALSE(full.error);
  CHECK(levels_equal(full.levels, pyr, kLevels));
}

TEST_CASE("truncated and damaged streams") {
  const RawMeta m{CfaPattern::RGGB, 12, 0, 4095};
  const auto raw = synth::smooth_raw(128, 128, m, 5);
  const auto enc = encode(raw);
  const auto pyr = encoder_pyramid(raw);
  const auto h = parse_header(enc.bytes);
  std::vector<std::size_t> ends{h.payload_offset};
  for (int i = 0; i < kLevels; ++i) ends.push_back(ends.back() + h.section_size[i]);

  for (int cut = 0; cut < kLevels; ++cut) {
    // Cut at the end of section `cut - 1` and in the middle of section `cut`.
    for (std::size_t len : {ends[cut], (ends[cut] + ends[cut + 1]) / 2}) {
      const std::span<const std::uint8_t> part(enc.bytes.data(), len);
      const auto pd = decode_progressive(part);
      REQUIRE(pd.error);
      CHECK(pd.error->kind() == DecodeErrorKind::Truncated);
      CHECK(pd.error->scale() == cut);
      CHECK(levels_equal(pd.levels, pyr, std::size_t(cut)));
      try {
        decode(part);
        FAIL("decode accepted a truncated stream");
      } catch (const DecodeError& e) {
        CHECK(e.kind() == DecodeErrorKind::Truncated);
      }
    }
  }

  // A truncated stream still serves the complete scales as previews.
  const std::span<const std::uint8_t> after1(enc.bytes.data(), ends[2]);
  CHECK(decode_preview(after1, 1) == pyr.levels[1]);
  CHECK_THROWS_AS(decode_preview(after1, 2), DecodeError);

  auto flipped = enc.bytes;
  flipped[ends[3] + 2] ^= 0x40;  // inside section 3
  const auto pd = decode_progressive(flipped);
  REQUIRE(pd.error);
  CHECK(pd.error->kind() == DecodeErrorKind::ChecksumMismatch);
  CHECK(pd.error->scale() == 3);
  CHECK(levels_equal(pd.levels, pyr, 3));

  auto magic = enc.bytes;
  magic[1] = 'X';
  try {
    parse_header(magic);
    FAIL("bad magic accepted");
  } catch (const DecodeError& e) {
    CHECK(e.kind() == DecodeErrorKind::BadMagic);
    CHECK(e.scale() == -1);
  }
  auto version = enc.bytes;
  version[4] = 9;
  CHECK_THROWS_AS(decode(version), DecodeError);
  auto meta = enc.bytes;
  meta[6] = 30;  // bit depth
  try {
    decode(meta);
    FAIL("bad header accepted");
  } catch (const DecodeError& e) {
    CHECK(e.kind() == DecodeErrorKind::BadHeader);
  }
  CHECK_THROWS_AS(decode(std::span(enc.bytes.data(), 10)), DecodeError);
}

TEST_CASE("rate accounting") {
  const RawMeta m{CfaPattern::RGGB, 12, 0, 4095};
  for (std::uint64_t seed : {1, 2}) {
    for (const auto& raw : {synth::smooth_raw(128, 128, m, seed), synth::noise_raw(96, 96, m, seed),
                            synth::natural_raw(128, 128, m, seed)}) {
      const auto enc = encode(raw);
      const double pay = double(enc.payload_bits());
      CHECK(pay >= enc.model_bits);
      CHECK(pay <= enc.model_bits * 1.01 + 1024);

      const auto pyr = build_pyramid(symbol_planes(raw));
      const auto rep = entropy_loss(pyr, model_for(pyr, m.span(), {}), m.span());
      CHECK(rep.total_bits == doctest::Approx(enc.model_bits));
      CHECK(rep.bpp == doctest::Approx(rep.total_bits / double(raw.samples.size())));
    }
  }
  // Noise does not compress.
  const auto noise = synth::noise_raw(128, 128, m, 7);
  const double bpp = double(encode(noise).payload_bits()) / double(noise.samples.size());
  CHECK(bpp >= 12.0 * 0.97);
  CHECK(bpp <= 12.0 * 1.03);
}

TEST_CASE("cross-channel terms lower the entropy on correlated channels") {
  const RawMeta m{CfaPattern::RGGB, 12, 0, 4095};
  const auto raw = correlated_raw(128, 128, m, 3);
  const auto pyr = build_pyramid(symbol_planes(raw));
  EncodeOptions with, without;
  without.cross_channel = false;
  const double a = entropy_loss(pyr, model_for(pyr, m.span(), with), m.span()).bpp;
  const double b = entropy_loss(pyr, model_for(pyr, m.span(), without), m.span()).bpp;
  CHECK(a < b);
  CHECK(decode(encode(raw, with).bytes) == raw);
  CHECK(decode(encode(raw, without).bytes) == raw);
}

TEST_CASE("streams do not depend on the thread count") {
  const RawMeta m{CfaPattern::RYYB, 14, 512, 16383};
  const auto raw = synth::natural_raw(160, 96, m, 4);
  EncodeOptions one, eight;
  eight.threads = 8;
  const auto a = encode(raw, one).bytes;
  CHECK(a == encode(raw, one).bytes);
  CHECK(a == encode(raw, eight).bytes);
}
