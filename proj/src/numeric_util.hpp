#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace hardgrid::detail {

// Ceiling that forgives a few ulps of rounding above an integer, so that
// values like 10 / 0.1 or ln(e^2) * 48 land on the intended integer.
inline double tolerant_ceil(double x) {
  const double nearest = std::nearbyint(x);
  if (std::abs(x - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
    return nearest;
  return std::ceil(x);
}

}  // namespace hardgrid::detail
