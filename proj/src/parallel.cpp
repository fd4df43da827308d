#include "rhoraw/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rhoraw {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RHO_RAW_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return unsigned(v);
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace rhoraw
