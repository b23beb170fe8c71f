#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "sheath/error.hpp"
#include "sheath/grid.hpp"
#include "sheath/model.hpp"
#include "sheath/numerics.hpp"
#include "sheath/sagdeev.hpp"

namespace sheath {

/// Planar stationary sheath sampled on a half-line grid, with the potential
/// derivatives stored in closed form (phi' = -sign(phi_b) sqrt(2V),
/// phi'' = V'(phi), phi''' = V''(phi) phi') and the derivatives of
/// v = log n, u and T that the perturbation equations consume.
struct StationaryProfile {
  HalfLineGrid grid = HalfLineGrid::uniform(1.0, HalfLineGrid::kMinCells);
  PlasmaParams params;
  Regime regime = Regime::NondegenerateBohm;

  std::vector<double> n, u, T, phi;
  std::vector<double> dphi, d2phi, d3phi;
  std::vector<double> v, dv, du, dT;

  /// Where the ODE hands over to the analytic tail (infinity if never).
  double x_tail = std::numeric_limits<double>::infinity();
  double tail_jump_phi = 0.0;
  double tail_jump_dphi = 0.0;

  std::size_t size() const { return n.size(); }
};

inline constexpr double kTailFraction = 1e-6;

/// Truncation length such that the predicted tail is negligible against all
/// residual tolerances.
inline double default_length(const PlasmaParams& params) {
  const Regime r = classify_regime(params);
  if (params.phi_b == 0.0) return 25.0;
  if (r == Regime::DegenerateBohm) {
    const double Gamma = degenerate_gamma(params);
    return (1e3 - 1.0 / std::sqrt(std::abs(params.phi_b))) / Gamma;
  }
  const SagdeevContext ctx(params);
  const double k2 = ctx.d2V_at_zero();
  require(k2 > 0.0, ErrorKind::RefusedNoSheath, "default_length: V''(0) <= 0");
  return 25.0 / std::sqrt(k2);
}

namespace detail {

inline void fill_from_potential(StationaryProfile& prof, const SagdeevContext& ctx, double sign) {
  const PlasmaParams& p = prof.params;
  const std::size_t N = prof.phi.size();
  for (auto* a : {&prof.n, &prof.u, &prof.T, &prof.dphi, &prof.d2phi, &prof.d3phi, &prof.v,
                  &prof.dv, &prof.du, &prof.dT})
    a->assign(N, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    const double ph = prof.phi[j];
    const double delta = ph == 0.0 ? 0.0 : ctx.f_inverse_delta(ph);
    const double nn = 1.0 + delta;
    prof.n[j] = nn;
    prof.v[j] = std::log1p(delta);
    prof.u[j] = p.u_inf / nn;
    prof.T[j] = p.T_inf * std::exp((p.gamma - 1.0) * prof.v[j]);
    const double Vj = ph == 0.0 ? 0.0 : ctx.V(ph);
    if (Vj < 0.0)
      fail(ErrorKind::NumericalBranchFailure, "negative Sagdeev potential inside the sheath");
    prof.dphi[j] = -sign * std::sqrt(2.0 * Vj);
    prof.d2phi[j] = ph == 0.0 ? 0.0 : ctx.dV(ph);
    prof.d3phi[j] = ph == 0.0 ? 0.0 : ctx.d2V(ph) * prof.dphi[j];
    // v' = (f^{-1})'(phi) phi' / n
    prof.dv[j] = prof.dphi[j] / (nn * ctx.f_prime(nn));
    prof.du[j] = -prof.u[j] * prof.dv[j];
    prof.dT[j] = (p.gamma - 1.0) * prof.T[j] * prof.dv[j];
  }
}

}  // namespace detail

/// Builds the monotone sheath by integrating phi' = -sign(phi_b) sqrt(2 V(phi))
/// from phi(0) = phi_b with an adaptive Dormand-Prince stepper, then
/// switching to the linearized tail (exponential, or G^{-2} at the Bohm
/// threshold) once |phi| < 1e-6 |phi_b|.
inline StationaryProfile build_profile(const PlasmaParams& params, const HalfLineGrid& grid) {
  params.validate();
  StationaryProfile prof;
  prof.grid = HalfLineGrid(grid);
  prof.params = params;
  prof.regime = classify_regime(params);
  const std::size_t N = grid.size();
  const SagdeevContext ctx(params);

  if (params.phi_b == 0.0) {
    prof.phi.assign(N, 0.0);
    detail::fill_from_potential(prof, ctx, 1.0);
    return prof;
  }

  const ExistenceVerdict verdict = existence_check(params);
  if (!verdict.exists_monotone)
    fail(ErrorKind::RefusedNoSheath, "no monotone stationary solution for these parameters");

  const double sign = params.phi_b > 0.0 ? 1.0 : -1.0;
  const double tau = kTailFraction * std::abs(params.phi_b);
  const bool degenerate = prof.regime == Regime::DegenerateBohm;
  const double k_lin = degenerate ? 0.0 : std::sqrt(ctx.d2V_at_zero());
  const double Gamma = degenerate_gamma(params);

  using State = std::array<double, 1>;
  namespace odeint = boost::numeric::odeint;
  auto rhs = [&](const State& y, State& dydx, double /*x*/) {
    double phi = y[0];
    // Never step across the fixed point phi = 0.
    if (phi * sign <= 0.0) {
      dydx[0] = 0.0;
      return;
    }
    const double Vp = ctx.V(phi);
    if (Vp < 0.0)
      fail(ErrorKind::NumericalBranchFailure, "negative Sagdeev potential along the sheath");
    dydx[0] = -sign * std::sqrt(2.0 * Vp);
  };

  prof.phi.assign(N, 0.0);
  prof.phi[0] = params.phi_b;
  const double L = grid.length();
  auto stepper = odeint::make_dense_output(1e-18 * std::abs(params.phi_b), 1e-12,
                                           odeint::runge_kutta_dopri5<State>());
  State y{params.phi_b};
  stepper.initialize(y, 0.0, std::min(1e-3, grid.h(1)));
  std::size_t next = 1;
  bool switched = false;
  double x_s = 0.0, phi_s = 0.0;
  std::size_t steps = 0;
  while (next < N) {
    stepper.do_step(rhs);
    if (++steps > 5'000'000)
      fail(ErrorKind::NoConvergence, "stationary ODE exceeded the step budget");
    const double xc = stepper.current_time();
    while (next < N && grid[next] <= xc) {
      State ys;
      stepper.calc_state(grid[next], ys);
      prof.phi[next++] = ys[0];
    }
    const double phic = stepper.current_state()[0];
    if (std::abs(phic) < tau && xc < L) {
      switched = true;
      x_s = xc;
      phi_s = phic;
      break;
    }
    if (xc >= L) break;
  }

  if (switched) {
    prof.x_tail = x_s;
    const double dphi_ode = -sign * std::sqrt(2.0 * ctx.V(phi_s));
    double dphi_tail;
    if (degenerate) {
      const double w0 = 1.0 / std::sqrt(phi_s);
      for (std::size_t j = next; j < N; ++j) {
        const double w = Gamma * (grid[j] - x_s) + w0;
        prof.phi[j] = 1.0 / (w * w);
      }
      dphi_tail = -2.0 * Gamma * phi_s * std::sqrt(phi_s);
    } else {
      for (std::size_t j = next; j < N; ++j) prof.phi[j] = phi_s * std::exp(-k_lin * (grid[j] - x_s));
      dphi_tail = -k_lin * phi_s;
    }
    prof.tail_jump_phi = 0.0;
    prof.tail_jump_dphi = std::abs(dphi_tail - dphi_ode);
  }

  detail::fill_from_potential(prof, ctx, sign);
  return prof;
}

/// Max-norm residuals of the stationary system on a built profile.
struct ResidualReport {
  double mass = 0.0;           ///< |n u - u_inf|
  double momentum = 0.0;       ///< m n u u' + (R T n)' - n phi'
  double energy = 0.0;         ///< u T' + (gamma - 1) T u'
  double temperature = 0.0;    ///< |T - T_inf n^{gamma-1}|
  double branch = 0.0;         ///< |f(n) - phi|
  double poisson_closed = 0.0;    ///< |phi'' - (n - e^{-phi})| with stored phi''
  double poisson_discrete = 0.0;  ///< |D2 phi - (n - e^{-phi})| at interior nodes
  double first_integral = 0.0;    ///< |(phi')^2/2 - V(phi)|
  double derivative_closure = 0.0;  ///< |D1 phi - phi'| at interior nodes
  double bc_left = 0.0;        ///< |phi(0) - phi_b|
  double bc_right = 0.0;       ///< |phi(L)|

  bool algebraic_ok(double tol = 1e-10) const {
    return mass < tol && temperature < tol && branch < tol && momentum < tol && energy < tol &&
           poisson_closed < tol && bc_left < tol;
  }
};

inline ResidualReport profile_residuals(const StationaryProfile& prof, const PlasmaParams& params) {
  const SagdeevContext ctx(params);
  ResidualReport r;
  const std::size_t N = prof.size();
  const auto& g = prof.grid;
  for (std::size_t j = 0; j < N; ++j) {
    const double nn = prof.n[j], uu = prof.u[j], TT = prof.T[j], ph = prof.phi[j];
    const double dn = nn * prof.dv[j];
    r.mass = std::max(r.mass, std::abs(nn * uu - params.u_inf));
    r.momentum = std::max(r.momentum,
                          std::abs(params.m * nn * uu * prof.du[j] +
                                   params.R * (prof.dT[j] * nn + TT * dn) - nn * prof.dphi[j]));
    r.energy = std::max(r.energy, std::abs(uu * prof.dT[j] + (params.gamma - 1.0) * TT * prof.du[j]));
    r.temperature = std::max(
        r.temperature, std::abs(TT - params.T_inf * std::pow(nn, params.gamma - 1.0)));
    r.branch = std::max(r.branch, std::abs(ctx.f_of_n(nn) - ph));
    const double source = nn - std::exp(-ph);
    r.poisson_closed = std::max(r.poisson_closed, std::abs(prof.d2phi[j] - source));
    const double Vj = ph == 0.0 ? 0.0 : ctx.V(ph);
    r.first_integral = std::max(r.first_integral, std::abs(0.5 * prof.dphi[j] * prof.dphi[j] - Vj));
    if (j > 0 && j + 1 < N) {
      r.poisson_discrete = std::max(r.poisson_discrete, std::abs(g.d2(prof.phi, j) - source));
      r.derivative_closure = std::max(r.derivative_closure, std::abs(g.d1(prof.phi, j) - prof.dphi[j]));
    }
  }
  r.bc_left = std::abs(prof.phi.front() - params.phi_b);
  r.bc_right = std::abs(prof.phi.back());
  return r;
}

/// Exponential tail fit of log|phi| against x.
struct SpatialDecayFit {
  double rate = 0.0;
  double predicted_rate = 0.0;  ///< sqrt(V''(0))
  double relative_error = 0.0;
  double amplitude = 0.0;
  double r_squared = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t points = 0;
};

inline SpatialDecayFit verify_nondegenerate_decay(const StationaryProfile& prof,
                                                  const PlasmaParams& params) {
  require(classify_regime(params) == Regime::NondegenerateBohm, ErrorKind::WrongRegime,
          "exponential decay check needs the nondegenerate Bohm regime");
  require(params.phi_b != 0.0, ErrorKind::InvalidArgument, "decay check needs phi_b != 0");
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < prof.size(); ++j) {
    const double rel = std::abs(prof.phi[j]) / std::abs(params.phi_b);
    if (rel > 1e-8 && rel < 1e-2) {
      xs.push_back(prof.grid[j]);
      ys.push_back(std::log(std::abs(prof.phi[j])));
    }
  }
  if (xs.size() < 3)
    fail(ErrorKind::WindowTooShort, "decay window 1e-8 < |phi|/|phi_b| < 1e-2 has < 3 nodes");
  const auto line = numerics::fit_line(xs, ys);
  const SagdeevContext ctx(params);
  SpatialDecayFit fit;
  fit.rate = -line.slope;
  fit.predicted_rate = std::sqrt(ctx.d2V_at_zero());
  fit.relative_error = std::abs(fit.rate - fit.predicted_rate) / fit.predicted_rate;
  fit.amplitude = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  fit.x_lo = xs.front();
  fit.x_hi = xs.back();
  fit.points = xs.size();
  return fit;
}

/// Profile quantities U whose scaled derivatives approach -c_i at the Bohm
/// threshold.
enum class AsymptoticQuantity { MinusPhi, DensityMinusOne, LogDensity, VelocityRatio, Temperature };
inline constexpr std::array<AsymptoticQuantity, 5> kAsymptoticQuantities{
    AsymptoticQuantity::MinusPhi, AsymptoticQuantity::DensityMinusOne,
    AsymptoticQuantity::LogDensity, AsymptoticQuantity::VelocityRatio,
    AsymptoticQuantity::Temperature};

constexpr std::string_view to_string(AsymptoticQuantity q) {
  switch (q) {
    case AsymptoticQuantity::MinusPhi: return "-phi";
    case AsymptoticQuantity::DensityMinusOne: return "n-1";
    case AsymptoticQuantity::LogDensity: return "log_n";
    case AsymptoticQuantity::VelocityRatio: return "u/u_inf-1";
    case AsymptoticQuantity::Temperature: return "(T/T_inf-1)/gamma";
  }
  return "?";
}

/// sup over the grid of |d^i U G^{i+2} + c_i|. Entries that are not
/// computed (i >= 2 for U != -phi) hold NaN.
///
/// `literal` uses c_i exactly as stated. `normalized` replaces c_i with
/// kappa_U c_i, where kappa_U = dU/d(-phi) at phi = 0, which is the constant
/// each U actually approaches (kappa = 1 for -phi, n - 1 and log n; -1 for
/// u/u_inf - 1; (gamma - 1)/gamma for the temperature form).
struct AsymptoticsReport {
  DegenerateConstants constants;
  std::array<std::array<double, 4>, 5> literal{};
  std::array<std::array<double, 4>, 5> normalized{};
  std::array<double, 5> kappa{};
};

inline constexpr double kDefaultDelta0 = 0.05;

inline AsymptoticsReport verify_degenerate_asymptotics(const StationaryProfile& prof,
                                                       const PlasmaParams& params,
                                                       double delta0 = kDefaultDelta0) {
  require(classify_regime(params) == Regime::DegenerateBohm, ErrorKind::WrongRegime,
          "algebraic asymptotics apply only at the Bohm threshold");
  require(params.phi_b > 0.0 && params.phi_b <= delta0, ErrorKind::InvalidArgument,
          "degenerate asymptotics need 0 < phi_b <= delta0");
  const SagdeevContext ctx(params);
  AsymptoticsReport rep;
  rep.constants = degenerate_constants(params);
  const auto& dc = rep.constants;
  const double g = params.gamma;
  const double inv_fp1 = -1.0 / ctx.f_prime_at_one();  // dn/d(-phi) at the far field
  rep.kappa = {1.0, inv_fp1, inv_fp1, -inv_fp1, (g - 1.0) / g * inv_fp1};

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& row : rep.literal) row.fill(0.0);
  for (auto& row : rep.normalized) row.fill(0.0);
  for (std::size_t q = 1; q < 5; ++q)
    for (int i = 2; i < 4; ++i) rep.literal[q][i] = rep.normalized[q][i] = nan;

  for (std::size_t j = 0; j < prof.size(); ++j) {
    const double G = dc.G(prof.grid[j]);
    const double nn = prof.n[j], dv = prof.dv[j];
    std::array<std::array<double, 4>, 5> d{};
    d[0] = {-prof.phi[j], -prof.dphi[j], -prof.d2phi[j], -prof.d3phi[j]};
    d[1][0] = nn - 1.0;
    d[1][1] = nn * dv;
    d[2][0] = prof.v[j];
    d[2][1] = dv;
    d[3][0] = prof.u[j] / params.u_inf - 1.0;
    d[3][1] = -dv / nn;
    d[4][0] = (prof.T[j] / params.T_inf - 1.0) / g;
    d[4][1] = (g - 1.0) / g * (prof.T[j] / params.T_inf) * dv;
    for (std::size_t q = 0; q < 5; ++q) {
      const int imax = q == 0 ? 4 : 2;
      double Gp = G * G;
      for (int i = 0; i < imax; ++i) {
        const double scaled = d[q][i] * Gp;
        rep.literal[q][i] = std::max(rep.literal[q][i], std::abs(scaled + dc.c(i)));
        rep.normalized[q][i] =
            std::max(rep.normalized[q][i], std::abs(scaled + rep.kappa[q] * dc.c(i)));
        Gp *= G;
      }
    }
  }
  return rep;
}

}  // namespace sheath
