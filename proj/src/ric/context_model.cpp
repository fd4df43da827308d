#include "rhoraw/ric/context_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "rhoraw/error.hpp"
#include "rhoraw/parallel.hpp"
#include "rhoraw/ric/logistic.hpp"

namespace rhoraw::ric {

int symbol_bits(int s) { return int(std::bit_width(unsigned(s))); }

void ModelParams::finalize() {
  for (auto& c : components) c.inv_sigma = (std::int64_t(1) << 32) / c.sigma_q16;
}

ContextModel ContextModel::static_profile() {
  ContextModel cm;
  cm.profile = Profile::Static;
  for (int scale = 1; scale <= kScales; ++scale)
    for (int pos = 0; pos < kPositions; ++pos)
      for (int slot = 0; slot < 4; ++slot) {
        ModelParams& m = cm.at(scale, pos, slot);
        m.cross_q16.assign(slot, 0);
        m.components.clear();
        std::int32_t left = kWeightTotal;
        for (int k = 0; k < kMixtureComponents; ++k) {
          ComponentQ c;
          c.offset_q16 = 0;
          c.sigma_q16 = (kQ16 / 4) << k;
          c.weight_q15 = left / (kMixtureComponents - k);
          left -= c.weight_q15;
          m.components.push_back(c);
        }
        m.finalize();
      }
  return cm;
}

namespace {

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(std::uint8_t(v | 0x80));
    v >>= 7;
  }
  out.push_back(std::uint8_t(v));
}

void put_signed(std::vector<std::uint8_t>& out, std::int64_t v) {
  put_varint(out, (std::uint64_t(v) << 1) ^ std::uint64_t(v >> 63));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (pos_ >= b_.size()) throw FormatError("context model: truncated");
      const std::uint8_t byte = b_[pos_++];
      v |= std::uint64_t(byte & 0x7f) << shift;
      if (!(byte & 0x80)) return v;
    }
    throw FormatError("context model: varint too long");
  }
  std::int64_t signed_varint() {
    const std::uint64_t z = varint();
    return std::int64_t(z >> 1) ^ -std::int64_t(z & 1);
  }
  std::int32_t i32() {
    const std::int64_t v = signed_varint();
    if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max())
      throw FormatError("context model: coefficient out of range");
    return std::int32_t(v);
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> ContextModel::serialize() const {
  std::vector<std::uint8_t> out;
  if (profile == Profile::Static) return out;
  for (const auto& m : models) {
    put_signed(out, m.bias_q16);
    put_signed(out, m.parent_q16);
    for (auto c : m.cross_q16) put_signed(out, c);
    put_varint(out, m.components.size());
    for (const auto& c : m.components) {
      put_signed(out, c.offset_q16);
      put_varint(out, std::uint64_t(c.sigma_q16));
      put_varint(out, std::uint64_t(c.weight_q15));
    }
  }
  return out;
}

ContextModel ContextModel::deserialize(std::span<const std::uint8_t> bytes) {
  ContextModel cm;
  cm.profile = Profile::Fitted;
  Reader r(bytes);
  for (int i = 0; i < kModelCount; ++i) {
    ModelParams& m = cm.models[i];
    const int slot = i % 4;
    m.bias_q16 = r.i32();
    m.parent_q16 = r.i32();
    m.cross_q16.resize(slot);
    for (auto& c : m.cross_q16) c = r.i32();
    const std::uint64_t k = r.varint();
    if (k < 1 || k > kMixtureComponents) throw FormatError("context model: bad component count");
    std::int64_t total = 0;
    m.components.resize(k);
    for (auto& c : m.components) {
      c.offset_q16 = r.i32();
      const std::uint64_t sigma = r.varint(), weight = r.varint();
      if (sigma < std::uint64_t(kSigmaMinQ16) || sigma > std::uint64_t(std::numeric_limits<std::int32_t>::max()))
        throw FormatError("context model: bad sigma");
      if (weight < 1 || weight > std::uint64_t(kWeightTotal)) throw FormatError("context model: bad weight");
      c.sigma_q16 = std::int32_t(sigma);
      c.weight_q15 = std::int32_t(weight);
      total += c.weight_q15;
    }
    if (total != kWeightTotal) throw FormatError("context model: weights do not sum to 2^15");
    m.finalize();
  }
  if (!r.done()) throw FormatError("context model: trailing bytes");
  return cm;
}

std::int64_t predict_q16(const ModelParams& m, std::int64_t u, const std::int64_t* d, int s) {
  std::int64_t acc = std::int64_t(m.parent_q16) * u;
  for (std::size_t j = 0; j < m.cross_q16.size(); ++j) acc += std::int64_t(m.cross_q16[j]) * d[j];
  const std::int64_t mu = std::int64_t(m.bias_q16) + (acc >> 2);
  const std::int64_t span = std::int64_t(s + 1) << 16;
  return std::clamp(mu, -span, 2 * span);
}

namespace {

struct Component {
  double weight, mean, sigma;
};

double sigma_from_variance(double var) {
  return std::max(kSigmaMin, std::sqrt(std::max(var - 1.0 / 12.0, 0.0)) * std::numbers::sqrt3 / std::numbers::pi);
}

double bin_mass(double r, const Component& c) {
  return portable_sigmoid((r + 0.5 - c.mean) / c.sigma) - portable_sigmoid((r - 0.5 - c.mean) / c.sigma);
}

std::vector<Component> fit_mixture(std::vector<double> r, int iterations) {
  const std::size_t n = r.size();
  std::vector<Component> comps;
  std::vector<double> sorted = r;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < kMixtureComponents; ++k) {
    const std::size_t lo = k * n / kMixtureComponents, hi = (k + 1) * n / kMixtureComponents;
    if (hi <= lo) continue;
    double mean = 0.0;
    for (std::size_t i = lo; i < hi; ++i) mean += sorted[i];
    mean /= double(hi - lo);
    double var = 0.0;
    for (std::size_t i = lo; i < hi; ++i) var += (sorted[i] - mean) * (sorted[i] - mean);
    var /= double(hi - lo);
    comps.push_back({double(hi - lo) / double(n), mean, sigma_from_variance(var)});
  }

  std::vector<double> resp;
  for (int it = 0; it < iterations && !comps.empty(); ++it) {
    const std::size_t k = comps.size();
    resp.assign(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double p = comps[j].weight * bin_mass(r[i], comps[j]);
        resp[i * k + j] = p;
        total += p;
      }
      if (total > 1e-300) {
        for (std::size_t j = 0; j < k; ++j) resp[i * k + j] /= total;
      } else {
        std::size_t best = 0;
        for (std::size_t j = 1; j < k; ++j)
          if (std::abs(r[i] - comps[j].mean) < std::abs(r[i] - comps[best].mean)) best = j;
        resp[i * k + best] = 1.0;
      }
    }
    std::vector<Component> next;
    for (std::size_t j = 0; j < k; ++j) {
      double nk = 0.0, sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * k + j];
        sum += resp[i * k + j] * r[i];
      }
      if (nk < 1e-9) continue;
      const double mean = sum / nk;
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) var += resp[i * k + j] * (r[i] - mean) * (r[i] - mean);
      next.push_back({nk / double(n), mean, sigma_from_variance(var / nk)});
    }
    comps = std::move(next);
  }

  std::erase_if(comps, [](const Component& c) { return c.weight < 1e-4; });
  double total = 0.0;
  for (const auto& c : comps) total += c.weight;
  for (auto& c : comps) c.weight /= total;
  return comps;
}

std::int32_t to_q16(double v) {
  const double q = std::round(v * kQ16);
  constexpr double lim = double(std::numeric_limits<std::int32_t>::max());
  return std::int32_t(std::clamp(q, -lim, lim));
}

std::vector<ComponentQ> quantize(const std::vector<Component>& comps) {
  std::vector<ComponentQ> out;
  for (const auto& c : comps) {
    ComponentQ q;
    q.offset_q16 = to_q16(c.mean);
    q.sigma_q16 = std::max(kSigmaMinQ16, to_q16(c.sigma));
    q.weight_q15 = std::max<std::int32_t>(1, std::int32_t(std::lround(c.weight * kWeightTotal)));
    auto same = std::find_if(out.begin(), out.end(), [&](const ComponentQ& o) {
      return o.offset_q16 == q.offset_q16 && o.sigma_q16 == q.sigma_q16;
    });
    if (same != out.end())
      same->weight_q15 += q.weight_q15;
    else
      out.push_back(q);
  }
  if (out.empty()) out.push_back(ComponentQ{0, kSigmaMinQ16, kWeightTotal, 0});
  std::int32_t total = 0;
  for (const auto& q : out) total += q.weight_q15;
  auto largest = std::max_element(out.begin(), out.end(),
                                  [](const ComponentQ& a, const ComponentQ& b) { return a.weight_q15 < b.weight_q15; });
  largest->weight_q15 += kWeightTotal - total;
  return out;
}

// Training rows of one model: U, D_0..D_{slot-1}, target.
struct Rows {
  int slot = 0;
  std::vector<std::int64_t> data;
  std::size_t count() const { return data.size() / std::size_t(slot + 2); }
};

ModelParams fit_model(const Rows& rows, int s, const FitOptions& opt) {
  const int slot = rows.slot;
  const int nf = opt.cross_channel ? slot + 2 : 2;  // bias, parent, cross terms
  const std::size_t stride = std::size_t(slot + 2);
  const std::size_t n = rows.count();
  ModelParams m;
  m.cross_q16.assign(slot, 0);

  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(nf);
  Eigen::VectorXd f(nf);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t* row = &rows.data[i * stride];
    f(0) = 1.0;
    f(1) = double(row[0]) / 4.0;
    for (int j = 2; j < nf; ++j) f(j) = double(row[j - 1]) / 4.0;
    const double target = double(row[stride - 1]);
    for (int a = 0; a < nf; ++a) {
      atb(a) += f(a) * target;
      for (int b = 0; b < nf; ++b) ata(a, b) += f(a) * f(b);
    }
  }
  for (int a = 1; a < nf; ++a) ata(a, a) += 1e-9 * ata(a, a) + 1e-9;
  if (n > 0) {
    const Eigen::VectorXd beta = ata.ldlt().solve(atb);
    if (beta.allFinite()) {
      m.bias_q16 = to_q16(beta(0));
      m.parent_q16 = to_q16(beta(1));
      for (int j = 2; j < nf; ++j) m.cross_q16[j - 2] = to_q16(beta(j));
    }
  }

  std::vector<double> residuals;
  const std::size_t take = std::min(n, opt.em_samples);
  residuals.reserve(take);
  for (std::size_t t = 0; t < take; ++t) {
    const std::size_t i = take == n ? t : t * n / take;
    const std::int64_t* row = &rows.data[i * stride];
    const std::int64_t mu = predict_q16(m, row[0], row + 1, s);
    residuals.push_back(double(row[stride - 1]) - double(mu) / kQ16);
  }
  m.components = quantize(residuals.empty() ? std::vector<Component>{} : fit_mixture(residuals, opt.em_iterations));
  m.finalize();
  return m;
}

}  // namespace

ContextModel fit_context(const Pyramid& sym, int s, const FitOptions& opt) {
  std::vector<Rows> rows(kModelCount);
  for (int i = 0; i < kModelCount; ++i) rows[i].slot = i % 4;
  for (int scale = 1; scale <= kScales; ++scale) {
    const Planes& cur = sym.levels[scale];
    traverse_scale(sym.levels[scale - 1], [&](int pos, int slot, int ch, int x, int y, std::int64_t u,
                                              const std::int64_t* d) -> std::int64_t {
      Rows& r = rows[ContextModel::index(scale, pos, slot)];
      const std::int64_t v = cur.at(ch, x, y);
      r.data.push_back(u);
      for (int j = 0; j < slot; ++j) r.data.push_back(d[j]);
      r.data.push_back(v);
      return v;
    });
  }
  ContextModel cm;
  cm.profile = Profile::Fitted;
  parallel_for(kModelCount, opt.threads, [&](std::size_t i) { cm.models[i] = fit_model(rows[i], s, opt); });
  return cm;
}

SymbolModel::SymbolModel(const SigmoidTable& table, int s) : table_(table), s_(s), alphabet_(s + 1) {
  shift_ = std::max(0, symbol_bits(s) - kMaxBucketBits);
  buckets_ = ((alphabet_ - 1) >> shift_) + 1;
}

void SymbolModel::set(const ModelParams& m, std::int64_t mu_q16) {
  k_ = int(m.components.size());
  for (int j = 0; j < k_; ++j) {
    means_[j] = mu_q16 + m.components[j].offset_q16;
    inv_[j] = m.components[j].inv_sigma;
    weights_[j] = m.components[j].weight_q15;
  }
}

std::int64_t SymbolModel::cdf(std::int64_t j) const {
  if (j <= 0) return 0;
  if (j >= alphabet_) return kCdfOne;
  const std::int64_t edge = (j << 16) - (kQ16 / 2);
  std::int64_t f = 0;
  for (int c = 0; c < k_; ++c) f += weights_[c] * table_.lookup(((edge - means_[c]) * inv_[c]) >> 16);
  return f;
}

std::uint32_t SymbolModel::bucket_cum(int b) const {
  const std::int64_t f = cdf(std::int64_t(b) << shift_);
  return std::uint32_t(b + ((f * std::int64_t(kTotal - buckets_)) >> kCdfShift));
}

std::uint32_t SymbolModel::inner_cum(int lo, int n, std::int64_t base, std::int64_t mass, int j) const {
  if (j <= 0) return 0;
  if (j >= n) return kTotal;
  return std::uint32_t(j + ((cdf(lo + j) - base) * std::int64_t(kTotal - n)) / mass);
}

void SymbolModel::encode(RangeEncoder& enc, int sym) const {
  const int b = sym >> shift_;
  const std::uint32_t c0 = bucket_cum(b), c1 = bucket_cum(b + 1);
  enc.encode(c0, c1 - c0, kTotal);
  const int lo = b << shift_;
  const int n = std::min(1 << shift_, alphabet_ - lo);
  if (n <= 1) return;
  const std::int64_t base = cdf(lo), mass = cdf(lo + n) - base;
  const int j = sym - lo;
  if (mass <= 0) {
    enc.encode(std::uint32_t(j), 1, std::uint32_t(n));
    return;
  }
  const std::uint32_t i0 = inner_cum(lo, n, base, mass, j), i1 = inner_cum(lo, n, base, mass, j + 1);
  enc.encode(i0, i1 - i0, kTotal);
}

int SymbolModel::decode(RangeDecoder& dec) const {
  const std::uint32_t t = dec.target(kTotal);
  int lo_b = 0, hi_b = buckets_;
  std::uint32_t c_lo = 0, c_hi = kTotal;
  while (hi_b - lo_b > 1) {
    const int mid = (lo_b + hi_b) / 2;
    const std::uint32_t c = bucket_cum(mid);
    if (c <= t) {
      lo_b = mid;
      c_lo = c;
    } else {
      hi_b = mid;
      c_hi = c;
    }
  }
  dec.decode(c_lo, c_hi - c_lo);
  const int lo = lo_b << shift_;
  const int n = std::min(1 << shift_, alphabet_ - lo);
  if (n <= 1) return lo;
  const std::int64_t base = cdf(lo), mass = cdf(lo + n) - base;
  if (mass <= 0) {
    const std::uint32_t j = dec.target(std::uint32_t(n));
    dec.decode(j, 1);
    return lo + int(j);
  }
  const std::uint32_t ti = dec.target(kTotal);
  int a = 0, z = n;
  std::uint32_t i_lo = 0, i_hi = kTotal;
  while (z - a > 1) {
    const int mid = (a + z) / 2;
    const std::uint32_t c = inner_cum(lo, n, base, mass, mid);
    if (c <= ti) {
      a = mid;
      i_lo = c;
    } else {
      z = mid;
      i_hi = c;
    }
  }
  dec.decode(i_lo, i_hi - i_lo);
  return lo + a;
}

double SymbolModel::cost_bits(int sym) const {
  const int b = sym >> shift_;
  double bits = -std::log2(double(bucket_cum(b + 1) - bucket_cum(b)) / kTotal);
  const int lo = b << shift_;
  const int n = std::min(1 << shift_, alphabet_ - lo);
  if (n <= 1) return bits;
  const std::int64_t base = cdf(lo), mass = cdf(lo + n) - base;
  const int j = sym - lo;
  if (mass <= 0) return bits + std::log2(double(n));
  const double f = double(inner_cum(lo, n, base, mass, j + 1) - inner_cum(lo, n, base, mass, j));
  return bits - std::log2(f / kTotal);
}

BitTreeModel::BitTreeModel(int bits) : bits_(bits), p0_(std::size_t(1) << bits, 1 << (kProbBits - 1)) {}

void BitTreeModel::update(int node, int bit) {
  std::uint16_t& p = p0_[node];
  if (bit == 0)
    p = std::uint16_t(p + (((1 << kProbBits) - p) >> 4));
  else
    p = std::uint16_t(p - (p >> 4));
}

void BitTreeModel::encode(RangeEncoder& enc, int value) {
  int node = 1;
  for (int i = bits_ - 1; i >= 0; --i) {
    const int bit = (value >> i) & 1;
    const std::uint32_t p = p0_[node];
    if (bit == 0)
      enc.encode(0, p, 1u << kProbBits);
    else
      enc.encode(p, (1u << kProbBits) - p, 1u << kProbBits);
    update(node, bit);
    node = 2 * node + bit;
  }
}

int BitTreeModel::decode(RangeDecoder& dec) {
  int node = 1, value = 0;
  for (int i = bits_ - 1; i >= 0; --i) {
    const std::uint32_t p = p0_[node];
    const int bit = dec.target(1u << kProbBits) >= p ? 1 : 0;
    if (bit == 0)
      dec.decode(0, p);
    else
      dec.decode(p, (1u << kProbBits) - p);
    update(node, bit);
    node = 2 * node + bit;
    value = (value << 1) | bit;
  }
  return value;
}

double BitTreeModel::cost_and_update(int value) {
  double bits = 0.0;
  int node = 1;
  for (int i = bits_ - 1; i >= 0; --i) {
    const int bit = (value >> i) & 1;
    const double p = double(p0_[node]) / double(1 << kProbBits);
    bits -= std::log2(bit == 0 ? p : 1.0 - p);
    update(node, bit);
    node = 2 * node + bit;
  }
  return bits;
}

}  // namespace rhoraw::ric
