#ifndef RHORAW_RAW_HPP_
#define RHORAW_RAW_HPP_

#include "rhoraw/image.hpp"

namespace rhoraw {

// Linearization: (x_file - black) / (saturation - black), clamped to [0,1].
NormalizedRaw normalize(const BayerRaw& raw);

// Inverse of normalize; rounds half away from zero.
BayerRaw denormalize(const NormalizedRaw& x);

// Bilinear demosaic. Every site keeps its own sample in the matching output
// channel; missing colours are the mean of the nearest same-colour sites.
// Borders replicate the nearest same-colour sample (mirror indexing keeps the
// CFA phase). RYYB is demosaiced with Y in the green slot.
RgbImage demosaic(const NormalizedRaw& x);

// Samples each RGB channel at the sites of its colour.
NormalizedRaw mosaic(const RgbImage& y, const RawMeta& meta);

PlaneStack<double> stack(const NormalizedRaw& x);
PlaneStack<std::uint16_t> stack(const BayerRaw& x);
NormalizedRaw unstack(const PlaneStack<double>& s, const RawMeta& meta);
BayerRaw unstack(const PlaneStack<std::uint16_t>& s, const RawMeta& meta);

}  // namespace rhoraw

#endif  // RHORAW_RAW_HPP_
