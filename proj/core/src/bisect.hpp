#pragma once

#include <cmath>

namespace silevy::detail {

/// Smallest x in [lo, hi] with f(x) >= target for nondecreasing f, to within
/// `x_tol`. Returns lo when f(lo) >= target and hi when f(hi) < target.
template <class F>
double leftmost_crossing(F&& f, double target, double lo, double hi, double x_tol = 1e-15) {
  if (f(lo) >= target) return lo;
  if (f(hi) < target) return hi;
  for (int iter = 0; iter < 200 && hi - lo > x_tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace silevy::detail
