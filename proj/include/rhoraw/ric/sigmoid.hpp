#ifndef RHORAW_RIC_SIGMOID_HPP_
#define RHORAW_RIC_SIGMOID_HPP_

#include <array>
#include <cstdint>

namespace rhoraw::ric {

// exp(x) built from + - * / only, so every IEEE-754 platform produces the
// same bits. |x| is clamped to 64.
double portable_exp(double x);
double portable_sigmoid(double x);

// Logistic sigmoid sampled on z in [-16, 16] at step 1/128, values in Q24.
// Lookups take z in Q16 and interpolate linearly in integer arithmetic.
class SigmoidTable {
 public:
  static constexpr int kEntries = 4097;
  static constexpr int kStepShift = 9;  // Q16 units per table step = 2^9
  static constexpr std::int64_t kZMax = std::int64_t(16) << 16;
  static constexpr std::int64_t kOne = std::int64_t(1) << 24;

  SigmoidTable();

  std::int64_t lookup(std::int64_t z_q16) const {
    if (z_q16 <= -kZMax) return table_[0];
    if (z_q16 >= kZMax) return table_[kEntries - 1];
    const std::int64_t u = z_q16 + kZMax;
    const std::int64_t i = u >> kStepShift;
    const std::int64_t frac = u & ((1 << kStepShift) - 1);
    return table_[i] + (((table_[i + 1] - table_[i]) * frac) >> kStepShift);
  }

  std::int32_t entry(int i) const { return table_[i]; }
  // Fault-injection hook for the selftest.
  void overwrite(int i, std::int32_t value) { table_[i] = value; }
  static const SigmoidTable& standard();

 private:
  std::array<std::int32_t, kEntries> table_;
};

}  // namespace rhoraw::ric

#endif  // RHORAW_RIC_SIGMOID_HPP_
