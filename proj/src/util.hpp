#pragma once

#include <cmath>

namespace bhgs {

/// |x|^q with a multiply chain for the even integer powers used throughout.
inline double abs_pow(double x, double q) {
  const double a = std::abs(x);
  if (q == 10.0) {
    const double a2 = a * a, a4 = a2 * a2;
    return a4 * a4 * a2;
  }
  if (q == 6.0) {
    const double a2 = a * a;
    return a2 * a2 * a2;
  }
  if (q == 2.0) return a * a;
  return std::pow(a, q);
}

/// |x|^{q-2} x.
inline double signed_pow(double x, double q) { return abs_pow(x, q - 2.0) * x; }

/// Critical exponent 2(1 + 4/d).
inline double critical_power(int d) { return 2.0 * (1.0 + 4.0 / d); }

/// C-infinity step from 1 (s <= 0) down to 0 (s >= 1).
inline double smooth_step(double s) {
  if (s <= 0) return 1.0;
  if (s >= 1) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - s)), b = std::exp(-1.0 / s);
  return a / (a + b);
}

}  // namespace bhgs
