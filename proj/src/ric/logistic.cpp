#include "rhoraw/ric/logistic.hpp"

#include <cmath>
#include <string>

#include "rhoraw/error.hpp"

namespace rhoraw::ric {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double coef(const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; }

}  // namespace

double logistic_pmf(int sym, double mu, double sigma, int s) {
  if (s < 1) throw InvalidParams("alphabet span must be positive");
  if (sym < 0 || sym > s) throw InvalidParams("symbol outside [0, s]");
  if (!(sigma >= kSigmaMin)) throw InvalidParams("sigma below sigma_min");
  const double x = double(sym) / s;
  const double half = 0.5 / s;
  const double upper = sym == s ? 1.0 : sigmoid((x - mu + half) / sigma);
  const double lower = sym == 0 ? 0.0 : sigmoid((x - mu - half) / sigma);
  return upper - lower;
}

void LogisticMixture::validate() const {
  if (s < 1) throw InvalidParams("alphabet span must be positive");
  for (const auto& ch : channels) {
    if (ch.empty()) throw InvalidParams("mixture has no components");
    double total = 0.0;
    for (const auto& c : ch) {
      if (!(c.weight >= 0.0)) throw InvalidParams("negative mixture weight");
      if (!(c.sigma >= kSigmaMin)) throw InvalidParams("sigma below sigma_min");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidParams("mixture weights must sum to 1");
  }
}

std::vector<double> tilde_mu(const LogisticMixture& m, BayerChannel channel, const PartialGroup& d) {
  auto need = [&](const std::optional<double>& v, const char* name) {
    if (!v) throw OrderingViolation(std::string("channel ") + name + " must be decoded first");
    return *v;
  };
  const auto& comps = m.channels[int(channel)];
  std::vector<double> mu(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    double v = comps[k].mu;
    switch (channel) {
      case BayerChannel::Gr:
        break;
      case BayerChannel::Gb:
        v += coef(m.alpha, k) * need(d.g_r, "g_r");
        break;
      case BayerChannel::R:
        v += coef(m.beta, k) * need(d.g_r, "g_r") + coef(m.gamma, k) * need(d.g_b, "g_b");
        break;
      case BayerChannel::B:
        v += coef(m.delta, k) * need(d.g_r, "g_r") + coef(m.epsilon, k) * need(d.g_b, "g_b") +
             coef(m.zeta, k) * need(d.r, "r");
        break;
    }
    mu[k] = v;
  }
  return mu;
}

double mixture_pmf(int sym, const LogisticMixture& m, BayerChannel channel, const PartialGroup& decoded) {
  const auto mu = tilde_mu(m, channel, decoded);
  const auto& comps = m.channels[int(channel)];
  double p = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) p += comps[k].weight * logistic_pmf(sym, mu[k], comps[k].sigma, m.s);
  return p;
}

}  // namespace rhoraw::ric
