#pragma once

// Eigenvalues of a real symmetric 3x3 matrix by the trigonometric form of
// the characteristic cubic.

#include <algorithm>
#include <array>
#include <cmath>

namespace oracle {

using Sym3 = std::array<std::array<double, 3>, 3>;

inline std::array<double, 3> sym3_eigenvalues(const Sym3& A) {
  const double p1 = A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2];
  const double q = (A[0][0] + A[1][1] + A[2][2]) / 3.0;
  if (p1 == 0.0) {
    std::array<double, 3> e{A[0][0], A[1][1], A[2][2]};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double p2 = (A[0][0] - q) * (A[0][0] - q) + (A[1][1] - q) * (A[1][1] - q) +
                    (A[2][2] - q) * (A[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Sym3 B{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) B[i][j] = (A[i][j] - (i == j ? q : 0.0)) / p;
  const double detB = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                      B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                      B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
  const double r = std::clamp(detB / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double pi = 3.14159265358979323846;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  return {e3, e2, e1};
}

}  // namespace oracle
