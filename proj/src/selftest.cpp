#include "rhoraw/selftest.hpp"

#include <cmath>
#include <cstdio>

#include "rhoraw/isp.hpp"
#include "rhoraw/random.hpp"
#include "rhoraw/raw.hpp"
#include "rhoraw/ric/codec.hpp"
#include "rhoraw/ric/logistic.hpp"
#include "rhoraw/ric/pyramid.hpp"
#include "rhoraw/synth.hpp"

namespace rhoraw {

namespace {

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SelftestResult check_pyramid(Rng& rng) {
  ric::Planes x(32, 32);
  for (auto& p : x.planes)
    for (auto& v : p) v = std::uint16_t(rng.next() & 0x3ff);
  const auto pyr = ric::build_pyramid(x);
  std::size_t bad = 0;
  for (int i = 1; i < ric::kLevels; ++i) {
    const auto& hi = pyr.levels[i];
    const auto& lo = pyr.levels[i - 1];
    for (int c = 0; c < 4; ++c)
      for (int y = 0; y < lo.height; ++y)
        for (int q = 0; q < lo.width; ++q) bad += lo.at(c, q, y) != hi.at(c, 2 * q, 2 * y);
  }
  return {"pyramid-upper-left", bad == 0, fmt("%.0f mismatches", double(bad))};
}

// The integer coding model must give every symbol a nonzero count, sum to
// the coder total and stay close to the floating-point mixture.
SelftestResult check_pmf(Rng& rng, const ric::SigmoidTable& table) {
  constexpr double kTotal = ric::SymbolModel::kTotal;
  double worst = 0.0;
  bool counts_ok = true;
  for (int trial = 0; trial < 8 && counts_ok; ++trial) {
    const int s = trial % 2 ? 1023 : 255;
    ric::ModelParams m;
    m.bias_q16 = 0;
    m.parent_q16 = 0;
    double mu = rng.uniform(0.2, 0.8) * s;
    const int k = 1 + int(rng.next() % 4);
    std::int32_t left = ric::kWeightTotal;
    ric::LogisticMixture ref;
    ref.s = s;
    for (int j = 0; j < k; ++j) {
      ric::ComponentQ c;
      c.offset_q16 = std::int32_t(std::lround(rng.uniform(-10.0, 10.0) * ric::kQ16));
      c.sigma_q16 = std::int32_t(std::lround(rng.uniform(2.0, 20.0) * ric::kQ16));
      c.weight_q15 = left / (k - j);
      left -= c.weight_q15;
      m.components.push_back(c);
      ref.channels[1].push_back({double(c.weight_q15) / ric::kWeightTotal,
                                 (mu + double(c.offset_q16) / ric::kQ16) / s, double(c.sigma_q16) / ric::kQ16 / s});
    }
    m.finalize();
    ric::SymbolModel sm(table, s);
    const std::int64_t mu_q16 = std::llround(mu * ric::kQ16);
    sm.set(m, mu_q16);
    std::int64_t prev = -1;
    for (int j = 0; j <= s + 1; ++j) {
      const std::int64_t f = sm.cdf(j);
      if (f < prev) counts_ok = false;
      prev = f;
    }
    double total = 0.0;
    for (int sym = 0; sym <= s; ++sym) {
      const double p = std::exp2(-sm.cost_bits(sym));
      if (!(p > 0.0)) counts_ok = false;
      total += p;
      // One guaranteed count per symbol plus the mixture mass scaled to the
      // remaining counts; flooring moves each symbol by at most one count.
      const double want = (1.0 + ric::mixture_pmf(sym, ref, BayerChannel::Gr, {}) * (kTotal - s - 1)) / kTotal;
      worst = std::max(worst, std::abs(p - want) * kTotal);
    }
    if (std::abs(total - 1.0) > 1e-9) counts_ok = false;
  }
  const bool ok = counts_ok && worst < 2.5;
  return {"pmf-normalization", ok,
          fmt("max deviation from the reference mixture %.3g counts; normalization ", worst) +
              (counts_ok ? "ok" : "BROKEN")};
}

SelftestResult check_gamma() {
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 10000.0;
    worst = std::max(worst, std::abs(isp::bt709_decode(isp::bt709_encode(x)) - x));
  }
  return {"gamma-round-trip", worst < 1e-6, fmt("max error %.3g", worst)};
}

SelftestResult check_mosaic(Rng& rng) {
  bool ok = true;
  for (auto pattern : {CfaPattern::RGGB, CfaPattern::BGGR, CfaPattern::GRBG, CfaPattern::GBRG, CfaPattern::RYYB}) {
    NormalizedRaw x(16, 12, RawMeta{pattern, 12, 0, 4095});
    for (auto& v : x.samples) v = rng.uniform();
    const NormalizedRaw back = mosaic(demosaic(x), x.meta);
    ok = ok && back.samples == x.samples;
  }
  return {"mosaic-identity", ok, ok ? "known sites preserved" : "known sites changed"};
}

SelftestResult check_codec(std::uint64_t seed) {
  const RawMeta meta{CfaPattern::RGGB, 10, 16, 1023};
  const BayerRaw x = synth::smooth_raw(64, 64, meta, seed);
  const auto enc = ric::encode(x);
  const BayerRaw y = ric::decode(enc.bytes);
  const bool ok = y.samples == x.samples;
  return {"codec-round-trip", ok, fmt("%.0f bytes, ", double(enc.bytes.size())) + (ok ? "lossless" : "MISMATCH")};
}

}  // namespace

std::vector<SelftestResult> selftest(std::uint64_t seed, const ric::SigmoidTable& table) {
  Rng rng(seed);
  std::vector<SelftestResult> out;
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  };
  guarded("pyramid-upper-left", [&] { return check_pyramid(rng); });
  guarded("pmf-normalization", [&] { return check_pmf(rng, table); });
  guarded("gamma-round-trip", [&] { return check_gamma(); });
  guarded("mosaic-identity", [&] { return check_mosaic(rng); });
  guarded("codec-round-trip", [&] { return check_codec(seed); });
  return out;
}

std::vector<SelftestResult> selftest(std::uint64_t seed) { return selftest(seed, ric::SigmoidTable::standard()); }

}  // namespace rhoraw
