#include "rhoraw/ric/range_coder.hpp"

#include "rhoraw/error.hpp"

namespace rhoraw::ric {

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
  if (freq == 0 || total == 0 || total > kMaxTotal || cum + freq > total)
    throw Error("range coder: invalid interval");
  range_ /= total;
  low_ += cum * range_;
  range_ *= freq;
  for (;;) {
    if ((low_ ^ (low_ + range_)) >= kRangeTop) {
      if (range_ >= kRangeBot) break;
      range_ = (0u - low_) & (kRangeBot - 1);
    }
    out_.push_back(std::uint8_t(low_ >> 24));
    low_ <<= 8;
    range_ <<= 8;
  }
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 4; ++i) {
    out_.push_back(std::uint8_t(low_ >> 24));
    low_ <<= 8;
  }
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint32_t RangeDecoder::target(std::uint32_t total) {
  range_ /= total;
  const std::uint32_t t = (code_ - low_) / range_;
  return t < total ? t : total - 1;
}

void RangeDecoder::decode(std::uint32_t cum, std::uint32_t freq) {
  low_ += cum * range_;
  range_ *= freq;
  for (;;) {
    if ((low_ ^ (low_ + range_)) >= kRangeTop) {
      if (range_ >= kRangeBot) break;
      range_ = (0u - low_) & (kRangeBot - 1);
    }
    code_ = (code_ << 8) | next_byte();
    low_ <<= 8;
    range_ <<= 8;
  }
}

}  // namespace rhoraw::ric
