#pragma once

#include <cstddef>

namespace hoferlab {

/// Radical inverse of index in the given base; deterministic quasi-random
/// coordinates in [0, 1).
inline double halton(std::size_t index, unsigned base) {
  double f = 1.0;
  double r = 0.0;
  std::size_t i = index;
  while (i > 0) {
    f /= base;
    r += f * double(i % base);
    i /= base;
  }
  return r;
}

}  // namespace hoferlab
