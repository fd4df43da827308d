#ifndef RHORAW_RIC_LOGISTIC_HPP_
#define RHORAW_RIC_LOGISTIC_HPP_

#include <array>
#include <optional>
#include <vector>

#include "rhoraw/image.hpp"

// Floating-point reference for the discretized logistic mixture, in the
// normalized domain (symbol / s). The coder itself uses the integer model in
// context_model.hpp.
namespace rhoraw::ric {

inline constexpr double kSigmaMin = 1e-3;
inline constexpr int kMixtureComponents = 10;

// Mass of symbol `sym` in [0, s] under a logistic with mean mu and scale
// sigma (both normalized): the bin is [sym/s - 1/(2s), sym/s + 1/(2s)], and
// the two boundary symbols absorb the tails.
double logistic_pmf(int sym, double mu, double sigma, int s);

struct MixtureComponent {
  double weight = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
};

// One mixture per Bayer channel (indexed by BayerChannel) plus the
// cross-channel coefficients:
//   g_b: mu + alpha * g_r
//   r:   mu + beta * g_r + gamma * g_b
//   b:   mu + delta * g_r + epsilon * g_b + zeta * r
struct LogisticMixture {
  int s = 255;
  std::array<std::vector<MixtureComponent>, 4> channels;
  std::vector<double> alpha, beta, gamma, delta, epsilon, zeta;  // one per component

  void validate() const;
};

// Channels of the current pixel group decoded so far (normalized values).
struct PartialGroup {
  std::optional<double> g_r, g_b, r;
};

// Component means after the cross-channel shift. Throws OrderingViolation
// when a prerequisite channel is missing.
std::vector<double> tilde_mu(const LogisticMixture& m, BayerChannel channel, const PartialGroup& decoded);

double mixture_pmf(int sym, const LogisticMixture& m, BayerChannel channel, const PartialGroup& decoded);

}  // namespace rhoraw::ric

#endif  // RHORAW_RIC_LOGISTIC_HPP_
