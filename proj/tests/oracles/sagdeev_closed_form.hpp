#pragma once

// Closed-form Sagdeev potential. With eta = f(n) on the equilibrium branch,
//   int_0^phi f^{-1}(eta) d eta = n phi - (F(n) - F(1)),  F' = f,
// so V needs no quadrature once n = f^{-1}(phi) is known. The inverse is a
// plain bisection on f.

#include <cmath>

namespace oracle {

struct SagdeevClosedForm {
  double m, gamma, R, T_inf, u_inf;

  double a() const { return gamma * R * T_inf / (gamma - 1.0); }
  double b() const { return 0.5 * m * u_inf * u_inf; }
  double c_inf() const { return std::pow(m * u_inf * u_inf / (gamma * R * T_inf), 1.0 / (gamma + 1.0)); }

  double f(double n) const { return a() * (std::pow(n, gamma - 1.0) - 1.0) + b() * (1.0 / (n * n) - 1.0); }
  double F(double n) const { return a() * (std::pow(n, gamma) / gamma - n) + b() * (-1.0 / n - n); }

  // Root of f(n) = phi on the branch through n = 1.
  double inverse(double phi) const {
    const double c = c_inf();
    double lo, hi;
    if (c >= 1.0) {  // f decreases on (0, c]
      lo = 1e-12;
      hi = c;
    } else {  // f increases on [c, inf)
      lo = c;
      hi = 1.0;
      while (f(hi) < phi) hi *= 2.0;
    }
    const bool decreasing = c >= 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool above = f(mid) > phi;
      if (above == decreasing)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  double V(double phi) const {
    const double n = inverse(phi);
    return n * phi - (F(n) - F(1.0)) - (1.0 - std::exp(-phi));
  }
};

}  // namespace oracle
