#ifndef RHORAW_RIC_PYRAMID_HPP_
#define RHORAW_RIC_PYRAMID_HPP_

#include <array>
#include <cstdint>

#include "rhoraw/image.hpp"

namespace rhoraw::ric {

inline constexpr int kLevels = 5;
inline constexpr int kPlaneMultiple = 1 << (kLevels - 1);

using Planes = PlaneStack<std::uint16_t>;

// levels[4] is the full-resolution stack; levels[i-1] keeps the upper-left
// sample of every 2x2 group of levels[i].
struct Pyramid {
  std::array<Planes, kLevels> levels;
};

// Throws DimensionError unless the plane dimensions are multiples of 16.
Pyramid build_pyramid(const Planes& x);

// Mirror padding (edge sample not repeated) up to multiples of 16, and the
// inverse crop.
Planes pad_planes(const Planes& x);
Planes crop_planes(const Planes& x, int width, int height);

}  // namespace rhoraw::ric

#endif  // RHORAW_RIC_PYRAMID_HPP_
