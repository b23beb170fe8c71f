#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sheath/error.hpp"

namespace sheath {

enum class Stretching { Uniform, Geometric };

/// Nodes 0 = x_0 < x_1 < ... < x_M = L on the truncated half-line. `M` counts
/// cells, so there are M + 1 nodes.
class HalfLineGrid {
 public:
  static constexpr std::size_t kMinCells = 64;
  static constexpr double kMaxRatio = 1.02;
  /// Default ratio between the last and first cell widths of a geometric grid.
  static constexpr double kDefaultStretch = 20.0;

  static HalfLineGrid uniform(double L, std::size_t M) {
    check(L, M);
    std::vector<double> x(M + 1);
    for (std::size_t j = 0; j <= M; ++j) x[j] = L * static_cast<double>(j) / static_cast<double>(M);
    x[M] = L;
    return HalfLineGrid(std::move(x), Stretching::Uniform, 1.0);
  }

  /// Cell widths grow by `ratio` from the wall outward; nodes are
  /// x_j = L (r^j - 1) / (r^M - 1). Halving the log of the ratio while
  /// doubling M nests the coarse nodes in the fine grid.
  static HalfLineGrid geometric(double L, std::size_t M, double ratio) {
    check(L, M);
    require(ratio >= 1.0 && ratio <= kMaxRatio, ErrorKind::InvalidArgument,
            "geometric grid ratio must lie in [1, 1.02]");
    if (ratio == 1.0) return uniform(L, M);
    std::vector<double> x(M + 1);
    const double lr = std::log(ratio);
    const double denom = std::expm1(static_cast<double>(M) * lr);
    for (std::size_t j = 0; j <= M; ++j)
      x[j] = L * std::expm1(static_cast<double>(j) * lr) / denom;
    x[0] = 0.0;
    x[M] = L;
    return HalfLineGrid(std::move(x), Stretching::Geometric, ratio);
  }

  /// Geometric grid whose last/first cell-width ratio is `stretch`, with the
  /// per-cell ratio capped at kMaxRatio.
  static HalfLineGrid stretched(double L, std::size_t M, double stretch = kDefaultStretch) {
    require(stretch >= 1.0, ErrorKind::InvalidArgument, "stretch must be >= 1");
    const double ratio = std::min(kMaxRatio, std::pow(stretch, 1.0 / static_cast<double>(M - 1)));
    return geometric(L, M, ratio);
  }

  /// Same stretching family with twice the cells; every node of *this is a
  /// node of the result.
  HalfLineGrid refined() const {
    if (stretching_ == Stretching::Uniform) return uniform(length(), 2 * cells());
    return geometric(length(), 2 * cells(), std::sqrt(ratio_));
  }

  std::span<const double> nodes() const { return x_; }
  double operator[](std::size_t j) const { return x_[j]; }
  std::size_t cells() const { return x_.size() - 1; }
  std::size_t size() const { return x_.size(); }
  double length() const { return x_.back(); }
  Stretching stretching() const { return stretching_; }
  double ratio() const { return ratio_; }
  /// Width of cell [x_{j-1}, x_j], j >= 1.
  double h(std::size_t j) const { return x_[j] - x_[j - 1]; }
  double min_spacing() const {
    double m = x_[1] - x_[0];
    for (std::size_t j = 2; j < x_.size(); ++j) m = std::min(m, x_[j] - x_[j - 1]);
    return m;
  }

  /// First derivative at node j: three-point centered in the interior,
  /// three-point one-sided at the ends. Second order on any grid.
  double d1(std::span<const double> f, std::size_t j) const {
    const std::size_t n = x_.size();
    if (j == 0) return one_sided(f[0], f[1], f[2], x_[1] - x_[0], x_[2] - x_[1]);
    if (j == n - 1)
      return -one_sided(f[n - 1], f[n - 2], f[n - 3], x_[n - 1] - x_[n - 2],
                        x_[n - 2] - x_[n - 3]);
    const double hm = x_[j] - x_[j - 1], hp = x_[j + 1] - x_[j];
    return (-hp / (hm * (hm + hp))) * f[j - 1] + ((hp - hm) / (hm * hp)) * f[j] +
           (hm / (hp * (hm + hp))) * f[j + 1];
  }

  /// Standard three-point second difference at an interior node.
  double d2(std::span<const double> f, std::size_t j) const {
    const double hm = x_[j] - x_[j - 1], hp = x_[j + 1] - x_[j];
    return 2.0 / (hm + hp) * ((f[j + 1] - f[j]) / hp - (f[j] - f[j - 1]) / hm);
  }

  std::vector<double> derivative(std::span<const double> f) const {
    std::vector<double> out(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) out[j] = d1(f, j);
    return out;
  }

  /// Trapezoidal rule over the whole grid.
  double integrate(std::span<const double> f) const {
    double s = 0.0;
    for (std::size_t j = 1; j < x_.size(); ++j) s += 0.5 * (x_[j] - x_[j - 1]) * (f[j] + f[j - 1]);
    return s;
  }

 private:
  HalfLineGrid(std::vector<double> x, Stretching s, double ratio)
      : x_(std::move(x)), stretching_(s), ratio_(ratio) {}

  static void check(double L, std::size_t M) {
    require(std::isfinite(L) && L > 0.0, ErrorKind::InvalidArgument, "grid length must be > 0");
    require(M >= kMinCells, ErrorKind::InvalidArgument, "grid needs at least 64 cells");
  }

  // Derivative at a using the next two nodes at distances h1 and h1 + h2.
  static double one_sided(double f0, double f1, double f2, double h1, double h2) {
    const double H = h1 + h2;
    return -(h1 + H) / (h1 * H) * f0 + H / (h1 * h2) * f1 - h1 / (H * h2) * f2;
  }

  std::vector<double> x_;
  Stretching stretching_;
  double ratio_;
};

/// Uniform periodic transverse direction; ny == 1 means a planar (1-D) run.
struct TransverseGrid {
  std::size_t ny = 1;
  double Ly = 1.0;

  double dy() const { return Ly / static_cast<double>(ny); }
  bool active() const { return ny > 1; }
};

}  // namespace sheath
