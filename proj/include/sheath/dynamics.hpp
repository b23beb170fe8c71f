#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sheath/diagnostics.hpp"
#include "sheath/error.hpp"
#include "sheath/grid.hpp"
#include "sheath/model.hpp"
#include "sheath/numerics.hpp"
#include "sheath/poisson.hpp"
#include "sheath/state.hpp"
#include "sheath/stationary.hpp"

namespace sheath {

// ---------------------------------------------------------------- initial data

enum class InitialFamily { Zero, GaussianExp, GaussianAlg, Custom };

constexpr std::string_view to_string(InitialFamily f) {
  switch (f) {
    case InitialFamily::Zero: return "zero";
    case InitialFamily::GaussianExp: return "gaussian_exp";
    case InitialFamily::GaussianAlg: return "gaussian_alg";
    case InitialFamily::Custom: return "custom";
  }
  return "?";
}

/// (varphi, psi1, zeta) at a point (x1, x2), for custom initial data.
using InitialFunction = std::function<std::array<double, 3>(double, double)>;

/// Shape of the initial perturbation: envelope * gaussian bump, scaled per
/// field. The envelope is e^{-lambda x1} (GaussianExp) or
/// (1 + beta x1)^{-(lambda + 2)/2} (GaussianAlg). A nonzero `jitter` shifts the
/// bump centre by a seeded uniform offset in [-jitter/2, jitter/2].
struct InitialSpec {
  InitialFamily family = InitialFamily::GaussianExp;
  double amplitude = 1e-3;
  double lambda = 1.0;
  double beta = 1.0;
  double center = 3.0;
  double width = 2.0;
  double psi_scale = 0.5;
  double zeta_scale = 0.5;
  double transverse_modulation = 0.5;  ///< relative cos(2 pi x2 / Ly) content
  double jitter = 0.0;
  std::uint64_t seed = 0;
  InitialFunction custom;
};

/// Uniform variate in [0, 1) from the top 53 bits, so that the draw is the
/// same on every standard library.
inline double seeded_unit(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline PoissonProblem make_poisson_problem(const StationaryProfile& prof, const TransverseGrid& tr,
                                           std::span<const double> varphi) {
  PoissonProblem pb;
  pb.grid = &prof.grid;
  pb.transverse = tr;
  pb.v_t = prof.v;
  pb.phi_t = prof.phi;
  pb.source = varphi;
  return pb;
}

/// Checks that n = e^{v~ + varphi} and T = T~ + zeta stay positive and finite.
inline void check_primitives(const PerturbationState& s, const StationaryProfile& prof,
                             ErrorKind kind) {
  for (std::size_t k = 0; k < s.ny(); ++k)
    for (std::size_t j = 0; j < s.nx; ++j) {
      const std::size_t i = k * s.nx + j;
      const double T = prof.T[j] + s.zeta[i];
      bool finite = std::isfinite(s.varphi[i]) && std::isfinite(s.zeta[i]);
      for (const auto& c : s.psi) finite = finite && std::isfinite(c[i]);
      if (!finite)
        fail(ErrorKind::NonFinite, "non-finite perturbation at x1 = " +
                                       std::to_string(prof.grid[j]) + ", k = " + std::to_string(k));
      if (!(T > 0.0))
        fail(kind, "temperature T~ + zeta <= 0 at x1 = " + std::to_string(prof.grid[j]));
    }
}

inline PerturbationState make_initial(const InitialSpec& spec, const StationaryProfile& prof,
                                      const TransverseGrid& tr = {}) {
  require(spec.amplitude >= 0.0 && std::isfinite(spec.amplitude), ErrorKind::InvalidArgument,
          "initial.amplitude must be >= 0");
  require(spec.width > 0.0, ErrorKind::InvalidArgument, "initial.width must be > 0");
  if (spec.family == InitialFamily::GaussianExp)
    require(spec.lambda > 0.0, ErrorKind::InvalidArgument, "initial.lambda must be > 0");
  if (spec.family == InitialFamily::GaussianAlg)
    require(spec.lambda > 0.0 && spec.beta > 0.0, ErrorKind::InvalidArgument,
            "initial.lambda and initial.beta must be > 0");
  if (spec.family == InitialFamily::Custom)
    require(static_cast<bool>(spec.custom), ErrorKind::InvalidArgument,
            "custom initial data needs a function");

  const auto& g = prof.grid;
  const std::size_t nx = g.size();
  PerturbationState s = PerturbationState::zeros(nx, tr);
  const double center =
      spec.center + (spec.jitter != 0.0 ? spec.jitter * (seeded_unit(spec.seed) - 0.5) : 0.0);

  if (spec.family != InitialFamily::Zero && spec.amplitude > 0.0) {
    for (std::size_t k = 0; k < tr.ny; ++k) {
      const double x2 = tr.active() ? static_cast<double>(k) * tr.dy() : 0.0;
      const double mod =
          tr.active() ? 1.0 + spec.transverse_modulation *
                                  std::cos(2.0 * std::numbers::pi * x2 / tr.Ly)
                      : 1.0;
      for (std::size_t j = 0; j + 1 < nx; ++j) {
        const double x = g[j];
        const std::size_t i = k * nx + j;
        if (spec.family == InitialFamily::Custom) {
          const auto v = spec.custom(x, x2);
          s.varphi[i] = v[0];
          s.psi[0][i] = v[1];
          s.zeta[i] = v[2];
          continue;
        }
        const double z = (x - center) / spec.width;
        const double env = spec.family == InitialFamily::GaussianExp
                               ? std::exp(-spec.lambda * x)
                               : std::pow(1.0 + spec.beta * x, -(spec.lambda + 2.0) / 2.0);
        const double a = spec.amplitude * mod * env * std::exp(-z * z);
        s.varphi[i] = a;
        s.psi[0][i] = spec.psi_scale * a;
        s.zeta[i] = spec.zeta_scale * a;
      }
    }
  }
  check_primitives(s, prof, ErrorKind::InvalidArgument);
  s.sigma = poisson_solve(make_poisson_problem(prof, tr, s.varphi)).sigma;
  return s;
}

// ---------------------------------------------------------------- spatial operator

namespace detail {

// Limited slopes of one line along x1 (minmod of the one-sided differences;
// one-sided at the ends).
inline void limited_slopes(const HalfLineGrid& g, std::span<const double> f,
                           std::vector<double>& s) {
  const std::size_t n = f.size();
  s.resize(n);
  s[0] = (f[1] - f[0]) / g.h(1);
  s[n - 1] = (f[n - 1] - f[n - 2]) / g.h(n - 1);
  for (std::size_t j = 1; j + 1 < n; ++j)
    s[j] = numerics::minmod((f[j] - f[j - 1]) / g.h(j), (f[j + 1] - f[j]) / g.h(j + 1));
}

// Upwind-biased derivative along x1 at node j for transport speed `a`.
inline double upwind_x1(const HalfLineGrid& g, std::span<const double> f,
                        std::span<const double> s, std::size_t j, double a, int order) {
  const std::size_t last = f.size() - 1;
  if (a <= 0.0) {
    if (order == 1) return (f[j + 1] - f[j]) / g.h(j + 1);
    if (j == 0) return g.d1(f, 0);
    const double right = f[j + 1] - 0.5 * s[j + 1] * g.h(j + 1);
    const double left = f[j] - 0.5 * s[j] * g.h(j);
    return (right - left) / (0.5 * (g.h(j) + g.h(j + 1)));
  }
  if (j == 0) return (f[1] - f[0]) / g.h(1);
  if (order == 1 || j == last) return (f[j] - f[j - 1]) / g.h(j);
  const double right = f[j] + 0.5 * s[j] * g.h(j + 1);
  const double left = f[j - 1] + 0.5 * s[j - 1] * g.h(j);
  return (right - left) / (0.5 * (g.h(j) + g.h(j + 1)));
}

// Upwind-biased derivative along the periodic x2 direction.
inline double upwind_x2(const std::vector<double>& f, std::size_t nx, std::size_t ny,
                        std::size_t j, std::size_t k, double dy, double a, int order) {
  auto at = [&](std::ptrdiff_t kk) {
    const std::size_t w = static_cast<std::size_t>((kk % static_cast<std::ptrdiff_t>(ny) +
                                                    static_cast<std::ptrdiff_t>(ny)) %
                                                   static_cast<std::ptrdiff_t>(ny));
    return f[w * nx + j];
  };
  const auto K = static_cast<std::ptrdiff_t>(k);
  auto slope = [&](std::ptrdiff_t kk) {
    return numerics::minmod(at(kk) - at(kk - 1), at(kk + 1) - at(kk)) / dy;
  };
  if (a <= 0.0) {
    if (order == 1) return (at(K + 1) - at(K)) / dy;
    return ((at(K + 1) - 0.5 * dy * slope(K + 1)) - (at(K) - 0.5 * dy * slope(K))) / dy;
  }
  if (order == 1) return (at(K) - at(K - 1)) / dy;
  return ((at(K) + 0.5 * dy * slope(K)) - (at(K - 1) + 0.5 * dy * slope(K - 1))) / dy;
}

inline double centered_x2(const std::vector<double>& f, std::size_t nx, std::size_t ny,
                          std::size_t j, std::size_t k, double dy) {
  const std::size_t kp = (k + 1) % ny, km = (k + ny - 1) % ny;
  return (f[kp * nx + j] - f[km * nx + j]) / (2.0 * dy);
}

}  // namespace detail

/// Time derivatives of (varphi, psi, zeta) from the hyperbolic part of the
/// perturbation system. Transport terms u . grad are upwinded on the sign of
/// the local velocity; the pressure, divergence and potential couplings use
/// centred differences (one-sided at x1 = 0). The node at x1 = L carries the
/// far-field state and has zero derivative. The returned state's `sigma`
/// is left empty.
inline PerturbationState rhs_eval(const PerturbationState& s, const StationaryProfile& prof,
                                  const PlasmaParams& p, const SchemeConfig& scheme) {
  const auto& g = prof.grid;
  const std::size_t nx = s.nx, ny = s.ny(), N = s.dim();
  require(nx == g.size(), ErrorKind::InvalidArgument, "rhs_eval: state does not match profile");
  const bool tr = s.transverse.active();
  const double dy = tr ? s.transverse.dy() : 1.0;
  const int order = scheme.spatial_order;

  PerturbationState d = PerturbationState::zeros(nx, s.transverse);
  d.t = s.t;
  d.sigma.clear();

  std::vector<double> s_phi, s_zeta;
  std::vector<std::vector<double>> s_psi(N);
  for (std::size_t k = 0; k < ny; ++k) {
    const std::size_t o = k * nx;
    auto line = [&](const std::vector<double>& f) { return std::span<const double>(f).subspan(o, nx); };
    const auto phi = line(s.varphi), zeta = line(s.zeta), sig = line(s.sigma);
    if (order == 2) {
      detail::limited_slopes(g, phi, s_phi);
      detail::limited_slopes(g, zeta, s_zeta);
      for (std::size_t c = 0; c < N; ++c) detail::limited_slopes(g, line(s.psi[c]), s_psi[c]);
    }
    for (std::size_t j = 0; j + 1 < nx; ++j) {
      const std::size_t i = o + j;
      const double u1 = prof.u[j] + s.psi[0][i];
      const double u2 = N > 1 ? s.psi[1][i] : 0.0;
      const double T = prof.T[j] + s.zeta[i];

      auto transport = [&](const std::vector<double>& f, std::span<const double> fl,
                           const std::vector<double>& sl) {
        double v = u1 * detail::upwind_x1(g, fl, sl, j, u1, order);
        if (tr) v += u2 * detail::upwind_x2(f, nx, ny, j, k, dy, u2, order);
        return v;
      };

      const double dphi1 = g.d1(phi, j), dzeta1 = g.d1(zeta, j), dsig1 = g.d1(sig, j);
      double div = g.d1(line(s.psi[0]), j);
      double dphi2 = 0.0, dzeta2 = 0.0, dsig2 = 0.0;
      if (tr) {
        div += detail::centered_x2(s.psi[1], nx, ny, j, k, dy);
        dphi2 = detail::centered_x2(s.varphi, nx, ny, j, k, dy);
        dzeta2 = detail::centered_x2(s.zeta, nx, ny, j, k, dy);
        dsig2 = detail::centered_x2(s.sigma, nx, ny, j, k, dy);
      }
      const double psi1 = s.psi[0][i];

      d.varphi[i] = -transport(s.varphi, phi, s_phi) - div - psi1 * prof.dv[j];
      d.psi[0][i] = -transport(s.psi[0], line(s.psi[0]), s_psi[0]) -
                    (p.R * T * dphi1 + p.R * dzeta1) / p.m - psi1 * prof.du[j] -
                    p.R * s.zeta[i] * prof.dv[j] / p.m + dsig1 / p.m;
      if (N > 1)
        d.psi[1][i] = -transport(s.psi[1], line(s.psi[1]), s_psi[1]) -
                      (p.R * T * dphi2 + p.R * dzeta2) / p.m + dsig2 / p.m;
      d.zeta[i] = -transport(s.zeta, zeta, s_zeta) - (p.gamma - 1.0) * T * div -
                  psi1 * prof.dT[j] - (p.gamma - 1.0) * s.zeta[i] * prof.du[j];
    }
  }
  return d;
}

// ---------------------------------------------------------------- time stepping

/// Largest characteristic speed over the grid together with the CFL step.
struct SpeedScan {
  double max_speed = -std::numeric_limits<double>::infinity();  ///< max of all wave speeds
  double dt = std::numeric_limits<double>::infinity();
};

/// Evaluates the wave speeds at every node, aborting with
/// CharacteristicViolation when any of them is >= 0 (the hyperbolic part
/// would then need a wall boundary condition). The step bound uses the
/// larger of the listed speeds and the acoustic speeds u1 +- sqrt(gamma R T / m).
inline SpeedScan scan_speeds(const PerturbationState& s, const StationaryProfile& prof,
                             const PlasmaParams& p, double cfl) {
  const auto& g = prof.grid;
  const std::size_t nx = s.nx, ny = s.ny();
  const bool tr = s.transverse.active();
  SpeedScan scan;
  double inv = 0.0;
  for (std::size_t k = 0; k < ny; ++k)
    for (std::size_t j = 0; j < nx; ++j) {
      const std::size_t i = k * nx + j;
      const double u1 = prof.u[j] + s.psi[0][i];
      const double T = prof.T[j] + s.zeta[i];
      if (!(T > 0.0))
        fail(ErrorKind::NumericalBranchFailure,
             "temperature T~ + zeta <= 0 at x1 = " + std::to_string(g[j]));
      const CharacteristicSpeeds cs = char_speeds(u1, T, p);
      const double top = cs.max_speed();
      scan.max_speed = std::max(scan.max_speed, top);
      if (top >= 0.0)
        fail(ErrorKind::CharacteristicViolation,
             "wave speed " + std::to_string(top) + " >= 0 at x1 = " + std::to_string(g[j]) +
                 (j == 0 ? " (wall)" : ""));
      const double c = std::sqrt(p.gamma * p.R * T / p.m);
      const double a1 = std::max(cs.max_abs(), std::abs(u1) + c);
      const double hloc = j == 0 ? g.h(1) : (j + 1 == nx ? g.h(j) : std::min(g.h(j), g.h(j + 1)));
      double rate = a1 / hloc;
      if (tr) rate += (std::abs(s.psi[1][i]) + c) / s.transverse.dy();
      inv = std::max(inv, rate);
    }
  scan.dt = inv > 0.0 ? cfl / inv : std::numeric_limits<double>::infinity();
  return scan;
}

namespace detail {

// out = a * x + b * (y + dt * dy), hyperbolic fields only; far-field node kept at zero.
inline void combine(PerturbationState& out, double a, const PerturbationState& x, double b,
                    const PerturbationState& y, double dt, const PerturbationState& dyv) {
  auto mix = [&](std::vector<double>& o, const std::vector<double>& xv,
                 const std::vector<double>& yv, const std::vector<double>& dv) {
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * xv[i] + b * (yv[i] + dt * dv[i]);
    for (std::size_t k = 0; k < out.ny(); ++k) o[k * out.nx + out.nx - 1] = 0.0;
  };
  mix(out.varphi, x.varphi, y.varphi, dyv.varphi);
  for (std::size_t c = 0; c < out.dim(); ++c) mix(out.psi[c], x.psi[c], y.psi[c], dyv.psi[c]);
  mix(out.zeta, x.zeta, y.zeta, dyv.zeta);
}

inline void resolve_sigma(PerturbationState& s, const StationaryProfile& prof) {
  s.sigma = poisson_solve(make_poisson_problem(prof, s.transverse, s.varphi), s.sigma).sigma;
}

}  // namespace detail

/// One strong-stability-preserving Runge-Kutta step of size `dt`, with the
/// potential re-solved after every stage.
inline PerturbationState step_with(const PerturbationState& s, const StationaryProfile& prof,
                                   const PlasmaParams& p, const SchemeConfig& scheme, double dt) {
  PerturbationState w1 = s, w2 = s;
  const PerturbationState k0 = rhs_eval(s, prof, p, scheme);
  detail::combine(w1, 0.0, s, 1.0, s, dt, k0);
  check_primitives(w1, prof, ErrorKind::NumericalBranchFailure);
  detail::resolve_sigma(w1, prof);
  const PerturbationState k1 = rhs_eval(w1, prof, p, scheme);
  if (scheme.rk_stages == 2) {
    detail::combine(w2, 0.5, s, 0.5, w1, dt, k1);
  } else {
    detail::combine(w2, 0.75, s, 0.25, w1, dt, k1);
    check_primitives(w2, prof, ErrorKind::NumericalBranchFailure);
    detail::resolve_sigma(w2, prof);
    const PerturbationState k2 = rhs_eval(w2, prof, p, scheme);
    PerturbationState w3 = w2;
    detail::combine(w3, 1.0 / 3.0, s, 2.0 / 3.0, w2, dt, k2);
    w2 = std::move(w3);
  }
  check_primitives(w2, prof, ErrorKind::NumericalBranchFailure);
  detail::resolve_sigma(w2, prof);
  w2.t = s.t + dt;
  return w2;
}

/// One step at the CFL-limited size.
inline PerturbationState step(const PerturbationState& s, const StationaryProfile& prof,
                              const PlasmaParams& p, const SchemeConfig& scheme) {
  scheme.validate();
  const SpeedScan scan = scan_speeds(s, prof, p, scheme.cfl);
  return step_with(s, prof, p, scheme, scan.dt);
}

// ---------------------------------------------------------------- evolution

/// Time series recorded at the output cadence.
struct Trajectory {
  std::vector<std::string> probe_ids;
  std::vector<double> t;
  std::vector<std::vector<double>> norms;  ///< norms[probe][row]
  std::vector<double> E0, min_n, min_T, max_speed;
  std::vector<double> wall_flux;  ///< x2-integrated perturbation of n u1 at x1 = 0
  std::vector<char> clipped;      ///< some probe weight was clipped in this row
  std::size_t steps = 0;
  double max_poisson_residual = 0.0;

  std::size_t rows() const { return t.size(); }
};

inline void record_row(Trajectory& tr, const PerturbationState& s, const StationaryProfile& prof,
                       const PlasmaParams& p, std::span<const WeightSpec> probes, double max_speed) {
  tr.t.push_back(s.t);
  bool clipped = false;
  for (std::size_t q = 0; q < probes.size(); ++q) {
    const NormResult nr = state_norm(s, prof.grid, probes[q]);
    tr.norms[q].push_back(nr.value);
    clipped = clipped || nr.clipped;
  }
  tr.clipped.push_back(clipped);
  tr.E0.push_back(energy_E0(s, prof, p));
  double mn = std::numeric_limits<double>::infinity(), mT = mn, flux = 0.0;
  const double wy = s.transverse.active() ? s.transverse.dy() : 1.0;
  for (std::size_t k = 0; k < s.ny(); ++k) {
    for (std::size_t j = 0; j < s.nx; ++j) {
      const std::size_t i = k * s.nx + j;
      mn = std::min(mn, std::exp(prof.v[j] + s.varphi[i]));
      mT = std::min(mT, prof.T[j] + s.zeta[i]);
    }
    const std::size_t i0 = k * s.nx;
    flux += wy * (std::exp(prof.v[0] + s.varphi[i0]) * (prof.u[0] + s.psi[0][i0]) -
                  prof.n[0] * prof.u[0]);
  }
  tr.min_n.push_back(mn);
  tr.min_T.push_back(mT);
  tr.max_speed.push_back(max_speed);
  tr.wall_flux.push_back(flux);
}

inline constexpr std::size_t kMaxSteps = 50'000'000;

/// Steps to scheme.t_end, landing exactly on the cadence times and recording
/// the probe norms there. Returns the trajectory; `final_state`, if given,
/// receives the last state.
inline Trajectory evolve(const PerturbationState& s0, const StationaryProfile& prof,
                         const PlasmaParams& p, const SchemeConfig& scheme,
                         std::span<const WeightSpec> probes,
                         PerturbationState* final_state = nullptr) {
  scheme.validate();
  for (const auto& w : probes) w.validate();
  Trajectory tr;
  for (const auto& w : probes) tr.probe_ids.push_back(w.id);
  tr.norms.assign(probes.size(), {});

  PerturbationState s = s0;
  auto poisson_check = [&](const PerturbationState& st) {
    std::vector<double> F;
    const double r =
        detail::poisson_residual(make_poisson_problem(prof, st.transverse, st.varphi), st.sigma, F);
    tr.max_poisson_residual = std::max(tr.max_poisson_residual, r);
  };
  SpeedScan scan = scan_speeds(s, prof, p, scheme.cfl);
  poisson_check(s);
  record_row(tr, s, prof, p, probes, scan.max_speed);

  std::size_t out_index = 1;
  const auto n_out = static_cast<std::size_t>(std::ceil(scheme.t_end / scheme.output_cadence - 1e-9));
  while (out_index <= n_out) {
    const double target = std::min(scheme.t_end, static_cast<double>(out_index) * scheme.output_cadence);
    while (s.t < target) {
      if (tr.steps >= kMaxSteps) fail(ErrorKind::NoConvergence, "evolve: step budget exhausted");
      const double remaining = target - s.t;
      const bool last = scan.dt >= remaining * (1.0 - 1e-12);
      s = step_with(s, prof, p, scheme, last ? remaining : scan.dt);
      if (last) s.t = target;
      ++tr.steps;
      scan = scan_speeds(s, prof, p, scheme.cfl);
    }
    poisson_check(s);
    record_row(tr, s, prof, p, probes, scan.max_speed);
    ++out_index;
  }
  if (final_state) *final_state = std::move(s);
  return tr;
}

}  // namespace sheath
