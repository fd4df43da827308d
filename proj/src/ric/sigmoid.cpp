#include "rhoraw/ric/sigmoid.hpp"

namespace rhoraw::ric {

namespace {

constexpr int kTaylorTerms = 14;

constexpr std::array<double, kTaylorTerms + 1> taylor_coefficients() {
  std::array<double, kTaylorTerms + 1> c{};
  c[0] = 1.0;
  for (int n = 1; n <= kTaylorTerms; ++n) c[n] = c[n - 1] / double(n);
  return c;
}

constexpr auto kTaylor = taylor_coefficients();

}  // namespace

double portable_exp(double x) {
  if (x > 64.0) x = 64.0;
  if (x < -64.0) x = -64.0;
  // exp(x) = exp(x / 128)^128; the Taylor series converges fast for |y| <= 0.5.
  const double y = x / 128.0;
  double sum = kTaylor[kTaylorTerms];
  for (int n = kTaylorTerms - 1; n >= 0; --n) sum = sum * y + kTaylor[n];
  for (int i = 0; i < 7; ++i) sum = sum * sum;
  return sum;
}

double portable_sigmoid(double x) { return 1.0 / (1.0 + portable_exp(-x)); }

SigmoidTable::SigmoidTable() {
  for (int i = 0; i < kEntries; ++i) {
    const double z = double(i - (kEntries - 1) / 2) / 128.0;
    const double v = portable_sigmoid(z) * double(kOne);
    table_[i] = std::int32_t(v + 0.5);
  }
}

const SigmoidTable& SigmoidTable::standard() {
  static const SigmoidTable table;
  return table;
}

}  // namespace rhoraw::ric
