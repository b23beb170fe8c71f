#pragma once

// Real root of l(l-1)(l-2) - 12(k l + 2) = 0 by Cardano's formula. The
// cubic l^3 - 3 l^2 + (2 - 12k) l - 24 has one real root for k in (0, 1].

#include <cmath>

namespace oracle {

inline double lambda0_cardano(double k) {
  // Depressed form with l = y + 1: y^3 + p y + q = 0.
  const double p = -1.0 - 12.0 * k;
  const double q = -24.0 - 12.0 * k;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  const double s = std::sqrt(disc);
  return 1.0 + std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
}

inline double lambda0_cardano_gamma(double gamma) { return lambda0_cardano(2.0 / (1.0 + gamma)); }

}  // namespace oracle
