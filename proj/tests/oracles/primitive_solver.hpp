#pragma once

// Independent 1-D solver for the primitive Euler-Poisson variables
// (n, u, T, phi), used to cross-check the perturbation-form stepper. It
// shares no code with the library's spatial operator or Poisson solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct PrimitiveParams {
  double m, gamma, R, phi_b;
};

struct PrimitiveState {
  std::vector<double> n, u, T, phi;
};

class PrimitiveSolver {
 public:
  PrimitiveSolver(std::vector<double> x, PrimitiveParams p, double cfl)
      : x_(std::move(x)), p_(p), cfl_(cfl) {}

  // Far-field values held at the last node are taken from `far`.
  void set_far_field(double n, double u, double T, double phi) {
    far_[0] = n;
    far_[1] = u;
    far_[2] = T;
    far_[3] = phi;
  }

  void solve_potential(PrimitiveState& s) const {
    const std::size_t N = x_.size();
    s.phi.front() = p_.phi_b;
    s.phi.back() = far_[3];
    std::vector<double> a(N), b(N), c(N), r(N), cp(N);
    for (int it = 0; it < 60; ++it) {
      double worst = 0.0;
      for (std::size_t j = 1; j + 1 < N; ++j) {
        const double hm = x_[j] - x_[j - 1], hp = x_[j + 1] - x_[j];
        a[j] = 2.0 / (hm * (hm + hp));
        c[j] = 2.0 / (hp * (hm + hp));
        const double lap = a[j] * s.phi[j - 1] - (a[j] + c[j]) * s.phi[j] + c[j] * s.phi[j + 1];
        r[j] = -(lap - s.n[j] + std::exp(-s.phi[j]));
        b[j] = -(a[j] + c[j]) - std::exp(-s.phi[j]);
        worst = std::max(worst, std::abs(r[j]));
      }
      if (worst < 1e-13) return;
      // Thomas sweep on rows 1..N-2.
      cp[1] = c[1] / b[1];
      r[1] /= b[1];
      for (std::size_t j = 2; j + 1 < N; ++j) {
        const double den = b[j] - a[j] * cp[j - 1];
        cp[j] = c[j] / den;
        r[j] = (r[j] - a[j] * r[j - 1]) / den;
      }
      for (std::size_t j = N - 2; j >= 2; --j) r[j - 1] -= cp[j - 1] * r[j];
      for (std::size_t j = 1; j + 1 < N; ++j) s.phi[j] += r[j];
    }
  }

  // Advances to time t_end with SSP-RK2.
  void advance(PrimitiveState& s, double t_end) const {
    double t = 0.0;
    solve_potential(s);
    while (t < t_end) {
      double dt = time_step(s);
      if (t + dt >= t_end * (1.0 - 1e-12)) dt = t_end - t;
      PrimitiveState k0 = rate(s);
      PrimitiveState w = s;
      axpy(w, s, dt, k0);
      solve_potential(w);
      PrimitiveState k1 = rate(w);
      PrimitiveState w2 = w;
      axpy(w2, w, dt, k1);
      for (std::size_t j = 0; j < s.n.size(); ++j) {
        s.n[j] = 0.5 * (s.n[j] + w2.n[j]);
        s.u[j] = 0.5 * (s.u[j] + w2.u[j]);
        s.T[j] = 0.5 * (s.T[j] + w2.T[j]);
      }
      solve_potential(s);
      t = (dt == t_end - t) ? t_end : t + dt;
    }
  }

 private:
  double time_step(const PrimitiveState& s) const {
    double inv = 0.0;
    for (std::size_t j = 0; j < x_.size(); ++j) {
      const double h = j == 0 ? x_[1] - x_[0]
                              : (j + 1 == x_.size() ? x_[j] - x_[j - 1]
                                                    : std::min(x_[j] - x_[j - 1], x_[j + 1] - x_[j]));
      const double sp = std::abs(s.u[j]) + std::sqrt(p_.gamma * p_.R * s.T[j] / p_.m);
      inv = std::max(inv, sp / h);
    }
    return cfl_ / inv;
  }

  static double mm(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
  }

  // Three-point derivative; second-order one-sided at the ends.
  double centered(const std::vector<double>& f, std::size_t j) const {
    const std::size_t N = x_.size();
    if (j == 0) {
      const double h1 = x_[1] - x_[0], h2 = x_[2] - x_[1], H = h1 + h2;
      return -(h1 + H) / (h1 * H) * f[0] + H / (h1 * h2) * f[1] - h1 / (H * h2) * f[2];
    }
    if (j == N - 1) {
      const double h1 = x_[N - 1] - x_[N - 2], h2 = x_[N - 2] - x_[N - 3], H = h1 + h2;
      return (h1 + H) / (h1 * H) * f[N - 1] - H / (h1 * h2) * f[N - 2] + h1 / (H * h2) * f[N - 3];
    }
    const double hm = x_[j] - x_[j - 1], hp = x_[j + 1] - x_[j];
    return (-hp / (hm * (hm + hp))) * f[j - 1] + ((hp - hm) / (hm * hp)) * f[j] +
           (hm / (hp * (hm + hp))) * f[j + 1];
  }

  // Transport derivative for a leftward speed, limited reconstruction from
  // the right.
  double upwind(const std::vector<double>& f, std::size_t j) const {
    if (j == 0) return centered(f, 0);
    const std::size_t N = x_.size();
    auto slope = [&](std::size_t i) {
      if (i == N - 1) return (f[i] - f[i - 1]) / (x_[i] - x_[i - 1]);
      return mm((f[i] - f[i - 1]) / (x_[i] - x_[i - 1]), (f[i + 1] - f[i]) / (x_[i + 1] - x_[i]));
    };
    const double hl = x_[j] - x_[j - 1], hr = x_[j + 1] - x_[j];
    const double face_r = f[j + 1] - 0.5 * hr * slope(j + 1);
    const double face_l = f[j] - 0.5 * hl * slope(j);
    return (face_r - face_l) / (0.5 * (hl + hr));
  }

  PrimitiveState rate(const PrimitiveState& s) const {
    const std::size_t N = x_.size();
    PrimitiveState d{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0),
                     std::vector<double>(N, 0.0), {}};
    for (std::size_t j = 0; j + 1 < N; ++j) {
      const double n = s.n[j], u = s.u[j], T = s.T[j];
      const double ux = centered(s.u, j), nx = centered(s.n, j), Tx = centered(s.T, j);
      const double phix = centered(s.phi, j);
      d.n[j] = -u * upwind(s.n, j) - n * ux;
      d.u[j] = -u * upwind(s.u, j) - p_.R / p_.m * (T * nx / n + Tx) + phix / p_.m;
      d.T[j] = -u * upwind(s.T, j) - (p_.gamma - 1.0) * T * ux;
    }
    return d;
  }

  void axpy(PrimitiveState& out, const PrimitiveState& x, double dt, const PrimitiveState& d) const {
    const std::size_t N = x_.size();
    for (std::size_t j = 0; j < N; ++j) {
      out.n[j] = x.n[j] + dt * d.n[j];
      out.u[j] = x.u[j] + dt * d.u[j];
      out.T[j] = x.T[j] + dt * d.T[j];
    }
    out.n[N - 1] = far_[0];
    out.u[N - 1] = far_[1];
    out.T[N - 1] = far_[2];
  }

  std::vector<double> x_;
  PrimitiveParams p_;
  double cfl_;
  double far_[4] = {1.0, -1.0, 1.0, 0.0};
};

}  // namespace oracle
