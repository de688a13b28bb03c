#pragma once

#include <algorithm>

namespace vtol {

/// Non-increasing C1 weight: 1 for x <= lo, 0 for x >= hi, and the cubic
/// 1 - 3s^2 + 2s^3 with s = (x - lo) / (hi - lo) in between.
inline double smooth_step_down(double x, double lo, double hi) {
  if (x <= lo) return 1.0;
  if (x >= hi) return 0.0;
  const double s = (x - lo) / (hi - lo);
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

/// Derivative of smooth_step_down with respect to x.
inline double smooth_step_down_slope(double x, double lo, double hi) {
  if (x <= lo || x >= hi) return 0.0;
  const double s = (x - lo) / (hi - lo);
  return -6.0 * s * (1.0 - s) / (hi - lo);
}

}  // namespace vtol
