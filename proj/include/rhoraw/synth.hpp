#ifndef RHORAW_SYNTH_HPP_
#define RHORAW_SYNTH_HPP_

#include <cstdint>

#include "rhoraw/image.hpp"

// Procedural test content shared by the tests, the acceptance suite and the
// CLI selftest.
namespace rhoraw::synth {

// Smooth scene: a few low-frequency waves and soft blobs per channel, values
// in [lo, hi].
RgbImage smooth_rgb(int width, int height, std::uint64_t seed, double lo = 0.05, double hi = 0.85);

// Linear ramps in x and y per channel, within [lo, hi].
RgbImage gradient_rgb(int width, int height, double lo = 0.1, double hi = 0.85);

RgbImage constant_rgb(int width, int height, double r, double g, double b);

// Mosaic whose codes follow a smooth surface plus a little noise.
BayerRaw smooth_raw(int width, int height, const RawMeta& meta, std::uint64_t seed, double noise = 1.5);

// Every sample uniform over [black_lev, saturation_lev].
BayerRaw noise_raw(int width, int height, const RawMeta& meta, std::uint64_t seed);

BayerRaw constant_raw(int width, int height, const RawMeta& meta, std::uint16_t value);

// smooth_rgb pushed through the default inverse ISP at a random illuminant.
BayerRaw natural_raw(int width, int height, const RawMeta& meta, std::uint64_t seed);

// Mosaic whose patch means follow p_k (patch x patch blocks, gaussian noise
// of `pixel_sigma` inside each block).
NormalizedRaw kquad_raw(int width, int height, double k, std::uint64_t seed, int patch = 16,
                        double pixel_sigma = 0.01);

}  // namespace rhoraw::synth

#endif  // RHORAW_SYNTH_HPP_
