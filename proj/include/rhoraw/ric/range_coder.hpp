#ifndef RHORAW_RIC_RANGE_CODER_HPP_
#define RHORAW_RIC_RANGE_CODER_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace rhoraw::ric {

// 32-bit carryless range coder (Subbotin). Totals must not exceed 2^16.
inline constexpr std::uint32_t kRangeTop = 1u << 24;
inline constexpr std::uint32_t kRangeBot = 1u << 16;
inline constexpr std::uint32_t kMaxTotal = kRangeBot;

class RangeEncoder {
 public:
  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total);
  // Emits the final four bytes; the encoder must not be used afterwards.
  std::vector<std::uint8_t> finish();

 private:
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xffffffffu;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);
  // Cumulative count of the next symbol; follow with decode() using the
  // symbol's interval.
  std::uint32_t target(std::uint32_t total);
  void decode(std::uint32_t cum, std::uint32_t freq);
  // Bytes read past the end of the input (treated as zeros).
  std::size_t overrun() const { return pos_ > bytes_.size() ? pos_ - bytes_.size() : 0; }

 private:
  std::uint8_t next_byte() {
    const std::size_t p = pos_++;
    return p < bytes_.size() ? bytes_[p] : 0;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xffffffffu;
  std::uint32_t code_ = 0;
};

}  // namespace rhoraw::ric

#endif  // RHORAW_RIC_RANGE_CODER_HPP_
