#ifndef RHORAW_SELFTEST_HPP_
#define RHORAW_SELFTEST_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "rhoraw/ric/sigmoid.hpp"

namespace rhoraw {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Embedded property checks: pyramid rule, PMF normalization, gamma round
// trip, mosaic identity and a small codec round trip. The PMF check runs on
// `table`, so a damaged table can be injected.
std::vector<SelftestResult> selftest(std::uint64_t seed, const ric::SigmoidTable& table);
std::vector<SelftestResult> selftest(std::uint64_t seed);

}  // namespace rhoraw

#endif  // RHORAW_SELFTEST_HPP_
