#include "rhoraw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rhoraw/error.hpp"
#include "rhoraw/isp.hpp"
#include "rhoraw/parallel.hpp"
#include "rhoraw/random.hpp"

namespace rhoraw::stats {

double KQuadModel::envelope() const { return std::max(density(0.0), density(0.5)); }

namespace {

void check_k(double k) {
  if (!KQuadModel::admissible(k)) throw InvalidParams("k must lie in [-6, 12]");
}

double draw(Rng& rng, const KQuadModel& m, double env) {
  for (;;) {
    const double mu = rng.uniform();
    if (rng.uniform() * env < m.density(mu)) return mu;
  }
}

// Antiderivative of mu^2 - mu + 1/6.
double q_antiderivative(double m) { return m * m * m / 3.0 - m * m / 2.0 + m / 6.0; }

double population_variance(const double* v, std::size_t n) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += v[i];
  mean /= double(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (v[i] - mean) * (v[i] - mean);
  return s / double(n);
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * double(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

std::vector<double> sample_kquad(double k, std::size_t n, std::uint64_t seed) {
  check_k(k);
  const KQuadModel m{k};
  const double env = m.envelope();
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = draw(rng, m, env);
  return out;
}

KFit fit_k(const std::vector<double>& samples, int bins) {
  if (samples.size() < kMinFitSamples) throw InvalidParams("fit_k needs at least 100 samples");
  if (bins < 2) throw InvalidParams("fit_k needs at least two bins");
  std::vector<double> hist(bins, 0.0);
  for (double s : samples) {
    const double c = std::clamp(s, 0.0, 1.0);
    hist[std::min(bins - 1, int(c * bins))] += 1.0;
  }
  const double per_bin = double(samples.size()) / bins;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < bins; ++i) {
    const double lo = double(i) / bins, hi = double(i + 1) / bins;
    const double q = (q_antiderivative(hi) - q_antiderivative(lo)) * bins;
    num += q * (hist[i] / per_bin - 1.0);
    den += q * q;
  }
  KFit f;
  f.k_unclamped = num / den;
  f.k = std::clamp(f.k_unclamped, kMinK, kMaxK);
  f.samples = samples.size();
  return f;
}

namespace {

PatchStats patches_of(const std::vector<double>& v, int w, int h, int patch) {
  if (patch < 1) throw InvalidParams("patch size must be positive");
  PatchStats s;
  s.patch_size = patch;
  std::vector<double> buf(std::size_t(patch) * patch);
  for (int py = 0; py + patch <= h; py += patch)
    for (int px = 0; px + patch <= w; px += patch) {
      std::size_t t = 0;
      for (int y = py; y < py + patch; ++y)
        for (int x = px; x < px + patch; ++x) buf[t++] = v[std::size_t(y) * w + x];
      const double mean = std::accumulate(buf.begin(), buf.end(), 0.0) / double(buf.size());
      s.means.push_back(mean);
      s.sigmas.push_back(std::sqrt(population_variance(buf.data(), buf.size())));
    }
  return s;
}

std::vector<double> channel_mean(const RgbImage& y) {
  std::vector<double> v(y.pixel_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (y.planes[0][i] + y.planes[1][i] + y.planes[2][i]) / 3.0;
  return v;
}

}  // namespace

PatchStats patch_stats(const NormalizedRaw& x, int patch_size) {
  return patches_of(x.samples, x.width, x.height, patch_size);
}

PatchStats patch_stats(const RgbImage& y, int patch_size) {
  return patches_of(channel_mean(y), y.width, y.height, patch_size);
}

KFit fit_k(const NormalizedRaw& x, int patch_size) { return fit_k(patch_stats(x, patch_size).means); }
KFit fit_k(const RgbImage& y, int patch_size) { return fit_k(patch_stats(y, patch_size).means); }

GammaKReport gamma_k_report(const NormalizedRaw& x, int patch_size) {
  NormalizedRaw g = x;
  for (double& v : g.samples) v = isp::bt709_encode(std::clamp(v, 0.0, 1.0));
  return {fit_k(x, patch_size), fit_k(g, patch_size)};
}

GammaKReport gamma_k_report(const RgbImage& y, int patch_size) {
  return {fit_k(y, patch_size), fit_k(isp::gamma_apply(y), patch_size)};
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParams("linear_fit needs two or more points");
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidParams("linear_fit: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParams("spearman needs two or more points");
  const auto rx = ranks(x), ry = ranks(y);
  const double n = double(x.size());
  const double m = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - m) * (ry[i] - m);
    sxx += (rx[i] - m) * (rx[i] - m);
    syy += (ry[i] - m) * (ry[i] - m);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

GradVarResult grad_var_mc(const std::vector<double>& k_grid, const GradVarConfig& cfg) {
  if (k_grid.empty()) throw InvalidParams("k grid is empty");
  if (cfg.patch < 1 || cfg.trials < 2) throw InvalidParams("grad_var_mc: bad config");
  if (!(cfg.eta > 0.0 && cfg.eta <= 1e-2)) throw InvalidParams("grad_var_mc: eta must lie in (0, 1e-2]");
  for (double k : k_grid) check_k(k);

  GradVarResult res;
  res.rows.resize(k_grid.size());
  const std::size_t hw = std::size_t(cfg.patch) * cfg.patch;
  parallel_for(k_grid.size(), cfg.threads, [&](std::size_t ki) {
    const KQuadModel m{k_grid[ki]};
    const double env = m.envelope();
    Rng rng(stream_seed(cfg.seed, ki));
    std::vector<double> p(hw), w(hw);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const double mu = draw(rng, m, env);
      double y = rng.uniform(-cfg.eta, cfg.eta);
      for (std::size_t j = 0; j < hw; ++j) {
        p[j] = mu + cfg.patch_sigma * rng.normal() - 0.5;
        w[j] = rng.uniform(-cfg.eta, cfg.eta);
        y += w[j] * p[j];
      }
      const double label = cfg.label_scale * rng.uniform();
      const double g = 2.0 * (y - label) * p[0] / double(hw);
      sum += g;
      sum2 += g * g;
    }
    const double n = double(cfg.trials);
    const double mean = sum / n;
    res.rows[ki] = {k_grid[ki], (sum2 - n * mean * mean) / (n - 1.0)};
  });
  if (res.rows.size() >= 2) {
    std::vector<double> ks, vs;
    for (const auto& r : res.rows) {
      ks.push_back(r.k);
      vs.push_back(r.variance);
    }
    res.fit = linear_fit(ks, vs);
  }
  return res;
}

void BnSimConfig::validate() const {
  if (batch_size < 2) throw InvalidParams("batch size must be at least 2");
  if (n_batches < 2 || n_repeats < 1) throw InvalidParams("n_batches >= 2 and n_repeats >= 1 required");
  if (k_grid.empty()) throw InvalidParams("k grid is empty");
  for (double k : k_grid) check_k(k);
}

BnResult bn_var_mc(const BnSimConfig& cfg) {
  cfg.validate();
  const std::size_t nk = cfg.k_grid.size();
  std::vector<double> per_task(nk * cfg.n_repeats);
  parallel_for(per_task.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t ki = task / cfg.n_repeats;
    const std::size_t rep = task % cfg.n_repeats;
    const KQuadModel m{cfg.k_grid[ki]};
    const double env = m.envelope();
    Rng rng(stream_seed(stream_seed(cfg.seed, ki), rep));
    const double mu_star = draw(rng, m, env);
    std::vector<double> batch(cfg.batch_size);
    std::vector<double> ys(cfg.n_batches);
    batch[0] = mu_star - 0.5;
    for (std::size_t b = 0; b < cfg.n_batches; ++b) {
      for (int j = 1; j < cfg.batch_size; ++j) batch[j] = draw(rng, m, env) - 0.5;
      const double v = population_variance(batch.data(), batch.size());
      ys[b] = 1.0 / std::sqrt(std::max(v, 1e-300));
    }
    per_task[task] = population_variance(ys.data(), ys.size());
  });
  BnResult res;
  std::vector<double> ks, vals;
  for (std::size_t ki = 0; ki < nk; ++ki) {
    double s = 0.0;
    for (std::size_t r = 0; r < cfg.n_repeats; ++r) s += per_task[ki * cfg.n_repeats + r];
    res.rows.push_back({cfg.k_grid[ki], s / double(cfg.n_repeats)});
    ks.push_back(cfg.k_grid[ki]);
    vals.push_back(res.rows.back().value);
  }
  res.spearman = nk >= 2 ? spearman(ks, vals) : 0.0;
  return res;
}

}  // namespace rhoraw::stats
