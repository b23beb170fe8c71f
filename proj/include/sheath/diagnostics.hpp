#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sheath/error.hpp"
#include "sheath/grid.hpp"
#include "sheath/model.hpp"
#include "sheath/numerics.hpp"
#include "sheath/state.hpp"
#include "sheath/stationary.hpp"

namespace sheath {

// ---------------------------------------------------------------- weights

/// Spatial weight of a Sobolev norm: (1 + beta x1)^alpha or e^{lambda x1}.
struct WeightSpec {
  enum class Kind { Algebraic, Exponential };
  Kind kind = Kind::Algebraic;
  double alpha = 0.0;
  double beta = 1.0;
  double lambda = 0.0;
  int order = 0;
  std::string id = "l2";

  static WeightSpec algebraic(double alpha, double beta, int order, std::string id = "") {
    WeightSpec w;
    w.kind = Kind::Algebraic;
    w.alpha = alpha;
    w.beta = beta;
    w.order = order;
    w.id = id.empty() ? "alg" : std::move(id);
    return w;
  }
  static WeightSpec exponential(double lambda, int order, std::string id = "") {
    WeightSpec w;
    w.kind = Kind::Exponential;
    w.lambda = lambda;
    w.order = order;
    w.id = id.empty() ? "exp" : std::move(id);
    return w;
  }

  void validate() const {
    require(order >= 0 && order <= 3, ErrorKind::InvalidArgument, "weight order must lie in 0..3");
    if (kind == Kind::Algebraic)
      require(beta > 0.0 && std::isfinite(alpha), ErrorKind::InvalidArgument,
              "algebraic weight needs beta > 0");
    else
      require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::InvalidArgument,
              "exponential weight needs lambda > 0");
  }

  /// log W(x1).
  double log_weight(double x1) const {
    return kind == Kind::Algebraic ? alpha * std::log1p(beta * x1) : lambda * x1;
  }
};

inline constexpr double kMaxLogWeight = 700.0;

struct NormResult {
  double value = 0.0;
  bool clipped = false;  ///< the weight or an integrand term left the double range
};

namespace detail {

// All partial derivatives up to `order` of one line-stored field, in the
// order f, d1 f, d2 f, d11 f, d12 f, d22 f, ... (x2 terms only when active).
inline std::vector<std::vector<double>> derivative_stack(const FieldView& f,
                                                         const HalfLineGrid& g,
                                                         const TransverseGrid& tr, int order) {
  const std::size_t nx = f.nx, ny = f.ny;
  auto dx = [&](const std::vector<double>& a) {
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < ny; ++k) {
      const std::span<const double> line(a.data() + k * nx, nx);
      for (std::size_t j = 0; j < nx; ++j) out[k * nx + j] = g.d1(line, j);
    }
    return out;
  };
  auto dy = [&](const std::vector<double>& a) {
    std::vector<double> out(a.size());
    const double inv = 0.5 / tr.dy();
    for (std::size_t k = 0; k < ny; ++k) {
      const std::size_t kp = (k + 1) % ny, km = (k + ny - 1) % ny;
      for (std::size_t j = 0; j < nx; ++j) out[k * nx + j] = (a[kp * nx + j] - a[km * nx + j]) * inv;
    }
    return out;
  };
  std::vector<std::vector<double>> stack;
  std::vector<std::vector<double>> level{std::vector<double>(f.data.begin(), f.data.end())};
  stack.push_back(level[0]);
  for (int i = 1; i <= order; ++i) {
    std::vector<std::vector<double>> next;
    // Multi-indices of order i: d1^(i-s) d2^s; build d2 only from the last entry.
    for (const auto& a : level) next.push_back(dx(a));
    if (tr.active()) next.push_back(dy(level.back()));
    for (const auto& a : next) stack.push_back(a);
    level = std::move(next);
  }
  return stack;
}

}  // namespace detail

/// sqrt of the integral of W * sum_{|s| <= order} (d^s f)^2 summed over the
/// given fields; trapezoid in x1, periodic rectangle rule in x2.
inline NormResult weighted_norm(std::span<const FieldView> fields, const HalfLineGrid& g,
                                const TransverseGrid& tr, const WeightSpec& w) {
  w.validate();
  NormResult r;
  const std::size_t nx = g.size();
  std::vector<double> logw(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    logw[j] = w.log_weight(g[j]);
    if (logw[j] > kMaxLogWeight) {
      logw[j] = kMaxLogWeight;
      r.clipped = true;
    }
  }
  const double wy = tr.active() ? tr.dy() : 1.0;
  std::vector<double> density(nx, 0.0);
  for (const FieldView& f : fields) {
    require(f.nx == nx && f.ny == tr.ny && f.data.size() == nx * tr.ny, ErrorKind::InvalidArgument,
            "weighted_norm: field does not match the grid");
    const auto stack = detail::derivative_stack(f, g, tr, w.order);
    for (const auto& d : stack)
      for (std::size_t k = 0; k < tr.ny; ++k)
        for (std::size_t j = 0; j < nx; ++j) density[j] += wy * d[k * nx + j] * d[k * nx + j];
  }
  for (std::size_t j = 0; j < nx; ++j) {
    density[j] *= std::exp(logw[j]);
    if (!std::isfinite(density[j])) {
      density[j] = std::numeric_limits<double>::max() / static_cast<double>(nx);
      r.clipped = true;
    }
  }
  r.value = std::sqrt(g.integrate(density));
  return r;
}

/// Norm of the hyperbolic unknowns (varphi, psi, zeta) of a state.
inline NormResult state_norm(const PerturbationState& s, const HalfLineGrid& g,
                             const WeightSpec& w) {
  std::vector<FieldView> views{s.view(s.varphi)};
  for (const auto& p : s.psi) views.push_back(s.view(p));
  views.push_back(s.view(s.zeta));
  return weighted_norm(views, g, s.transverse, w);
}

/// Integral of (n~/2) R T varphi^2 + (n~/2) m |psi|^2 + n~ R zeta^2 / (2 (gamma-1) T)
/// with T = T~ + zeta.
inline double energy_E0(const PerturbationState& s, const StationaryProfile& prof,
                        const PlasmaParams& p) {
  const auto& g = prof.grid;
  const std::size_t nx = s.nx;
  require(nx == g.size(), ErrorKind::InvalidArgument, "energy_E0: state does not match profile");
  const double wy = s.transverse.active() ? s.transverse.dy() : 1.0;
  std::vector<double> density(nx, 0.0);
  for (std::size_t k = 0; k < s.ny(); ++k)
    for (std::size_t j = 0; j < nx; ++j) {
      const std::size_t i = k * nx + j;
      const double T = prof.T[j] + s.zeta[i];
      require(T > 0.0, ErrorKind::NumericalBranchFailure, "energy_E0: temperature <= 0");
      double psi2 = 0.0;
      for (const auto& c : s.psi) psi2 += c[i] * c[i];
      const double n = prof.n[j];
      density[j] += wy * (0.5 * n * p.R * T * s.varphi[i] * s.varphi[i] + 0.5 * n * p.m * psi2 +
                          n * p.R / (2.0 * (p.gamma - 1.0) * T) * s.zeta[i] * s.zeta[i]);
    }
  return g.integrate(density);
}

// ---------------------------------------------------------------- decay fits

enum class DecayModel { Algebraic, Exponential };

constexpr std::string_view to_string(DecayModel m) {
  return m == DecayModel::Algebraic ? "algebraic" : "exponential";
}

/// Fitted law y ~ A (1 + beta t)^{-rate} or y ~ A e^{-rate t}.
struct DecayFit {
  DecayModel model = DecayModel::Exponential;
  double beta = 0.0;
  double rate = 0.0;
  double amplitude = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t points = 0;
  bool window_shrunk = false;  ///< nonpositive values forced a shorter window
};

inline constexpr std::size_t kMinFitPoints = 8;
inline constexpr double kDefaultFitStart = 0.2;

/// Least-squares fit on [t_lo, t_hi]; a NaN bound defaults to
/// [0.2 t_end, t_end] with t_end the last sample time.
inline DecayFit fit_decay(std::span<const double> t, std::span<const double> y, DecayModel model,
                          double beta = 1.0,
                          double t_lo = std::numeric_limits<double>::quiet_NaN(),
                          double t_hi = std::numeric_limits<double>::quiet_NaN()) {
  require(t.size() == y.size(), ErrorKind::InvalidArgument, "fit_decay: series length mismatch");
  if (t.empty()) fail(ErrorKind::FitUnderdetermined, "fit_decay: empty series");
  if (model == DecayModel::Algebraic)
    require(beta > 0.0, ErrorKind::InvalidArgument, "fit_decay: algebraic model needs beta > 0");
  const double t_end = t.back();
  if (std::isnan(t_lo)) t_lo = kDefaultFitStart * t_end;
  if (std::isnan(t_hi)) t_hi = t_end;

  DecayFit fit;
  fit.model = model;
  fit.beta = beta;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
      // The window ends where the series stops being positive.
      fit.window_shrunk = true;
      break;
    }
    xs.push_back(model == DecayModel::Algebraic ? std::log1p(beta * t[i]) : t[i]);
    ys.push_back(std::log(y[i]));
    fit.t_hi = t[i];
    if (xs.size() == 1) fit.t_lo = t[i];
  }
  if (xs.size() < kMinFitPoints)
    fail(ErrorKind::FitUnderdetermined, "fit_decay: " + std::to_string(xs.size()) +
                                            " usable points in the window, need 8");
  const auto line = numerics::fit_line(xs, ys);
  fit.rate = -line.slope;
  fit.amplitude = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  fit.points = xs.size();
  return fit;
}

enum class TheoremCase { NondegenerateAlgebraic, Degenerate };

/// Decay exponent of the squared weighted norm promised by the stability
/// theorems: lambda - eps (nondegenerate, algebraic weight) or
/// (lambda - eps) / 3 at the Bohm threshold. The norm itself decays at half
/// this rate.
inline double theorem_rate(double lambda, double eps, TheoremCase c) {
  require(eps > 0.0 && eps <= lambda, ErrorKind::InvalidArgument,
          "theorem_rate: need 0 < eps <= lambda");
  return c == TheoremCase::Degenerate ? (lambda - eps) / 3.0 : lambda - eps;
}

// ---------------------------------------------------------------- Q-form

/// Pointwise coefficients of the quadratic form in (varphi, psi1, zeta) that
/// controls the degenerate weighted energy estimate, with the positivity
/// verdicts and an eigenvalue cross-check per node.
struct QFormReport {
  double epsilon = 0.0;
  double beta = 0.0;
  double lambda0 = 0.0;
  bool epsilon_below_lambda0 = true;
  std::vector<double> x1, q1, q2, q3, q4, q5, B, S;
  std::vector<double> expr46;          ///< q1 q5^2 + q4 q2^2 - 4 q1 q3 q4
  std::vector<double> min_eig;         ///< smallest eigenvalue of the 3x3 matrix
  std::vector<double> min_eig_scaled;  ///< min_eig * B^2
  std::vector<char> ok44, ok45, ok46, eigen_agrees;
  double c_empirical = 0.0;  ///< min over nodes of -expr46 * B^2
  double min_scaled_eig = 0.0;

  bool all44() const { return std::all_of(ok44.begin(), ok44.end(), [](char c) { return c; }); }
  bool all45() const { return std::all_of(ok45.begin(), ok45.end(), [](char c) { return c; }); }
  bool all46() const { return std::all_of(ok46.begin(), ok46.end(), [](char c) { return c; }); }
  bool eigen_consistent() const {
    return std::all_of(eigen_agrees.begin(), eigen_agrees.end(), [](char c) { return c; });
  }
  std::size_t size() const { return x1.size(); }
};

/// Relative slack allowed when checking beta <= Gamma sqrt(phi_b).
inline constexpr double kBetaSlack = 1e-12;

/// Evaluates the coefficient block on the given nodes. eps >= lambda0 is
/// accepted as a probe and reported through `epsilon_below_lambda0`.
inline QFormReport qform_check(double epsilon, double beta, const PlasmaParams& p,
                               std::span<const double> nodes) {
  p.validate();
  require(classify_regime(p) == Regime::DegenerateBohm, ErrorKind::WrongRegime,
          "qform: needs u_inf on the Bohm threshold");
  require(p.phi_b > 0.0, ErrorKind::InvalidArgument, "qform: needs phi_b > 0");
  require(epsilon > 0.0 && std::isfinite(epsilon), ErrorKind::InvalidArgument,
          "qform: needs epsilon > 0");
  const double Gamma = degenerate_gamma(p);
  const double beta_max = Gamma * std::sqrt(p.phi_b);
  require(beta > 0.0, ErrorKind::InvalidArgument, "qform: needs beta > 0");
  require(beta <= beta_max * (1.0 + kBetaSlack), ErrorKind::InvalidArgument,
          "qform: needs beta <= Gamma sqrt(phi_b)");
  require(!nodes.empty(), ErrorKind::InvalidArgument, "qform: no nodes");

  QFormReport r;
  r.epsilon = epsilon;
  r.beta = beta;
  r.lambda0 = solve_lambda0(p.gamma);
  r.epsilon_below_lambda0 = epsilon < r.lambda0;

  const double e = epsilon, RT = p.R * p.T_inf, g = p.gamma, R = p.R, T = p.T_inf;
  const double au = std::abs(p.u_inf);
  const double iG2 = 1.0 / (Gamma * Gamma);
  const double x_ref = 1.0 / (Gamma * std::sqrt(p.phi_b));
  const std::size_t n = nodes.size();
  for (auto* v : {&r.x1, &r.q1, &r.q2, &r.q3, &r.q4, &r.q5, &r.B, &r.S, &r.expr46, &r.min_eig,
                  &r.min_eig_scaled})
    v->resize(n);
  for (auto* v : {&r.ok44, &r.ok45, &r.ok46, &r.eigen_agrees}) v->resize(n);

  r.c_empirical = std::numeric_limits<double>::infinity();
  r.min_scaled_eig = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = nodes[j];
    const double B = x + 1.0 / beta;
    const double S = B / (x + x_ref);
    const double S2 = S * S, S3 = S2 * S;
    const double k = iG2 / (B * B);
    const double q1 = 0.5 * e * RT +
                      k * (0.5 * (1.0 - RT) * e * S2 - 0.5 * Gamma * Gamma * e * (e - 1.0) * (e - 2.0) +
                           (g * RT - 1.0) * S3);
    const double q2 = -RT * e + k * (2.0 * e * RT * S2 + 2.0 * (1.0 - g * RT) * S3);
    const double q3 = 0.5 * e * g * RT + k * (0.5 * (1.0 - RT) * e * S2 + (3.0 * g * RT + 3.0) * S3);
    const double a4 = e * R / (2.0 * (g - 1.0) * T);
    const double q4 = a4 + k * (-a4 * S2 + g * R / ((g - 1.0) * T) * S3);
    const double q5 = -e * R + 2.0 * e * R * k * S2;

    const double ex = q1 * q5 * q5 + q4 * q2 * q2 - 4.0 * q1 * q3 * q4;
    Eigen::Matrix3d M;
    M << au * q1, 0.5 * q2, 0.0,
         0.5 * q2, q3 / au, 0.5 * q5,
         0.0, 0.5 * q5, au * q4;
    solver.computeDirect(M, Eigen::EigenvaluesOnly);
    const double lmin = solver.eigenvalues()(0);

    r.x1[j] = x;
    r.q1[j] = q1;
    r.q2[j] = q2;
    r.q3[j] = q3;
    r.q4[j] = q4;
    r.q5[j] = q5;
    r.B[j] = B;
    r.S[j] = S;
    r.expr46[j] = ex;
    r.min_eig[j] = lmin;
    r.min_eig_scaled[j] = lmin * B * B;
    r.ok44[j] = q1 > 0.0 && q3 > 0.0 && q4 > 0.0;
    r.ok45[j] = q2 * q2 - 4.0 * q1 * q3 < 0.0 && q5 * q5 - 4.0 * q3 * q4 < 0.0;
    r.ok46[j] = ex < 0.0;
    const bool positive = r.ok44[j] && r.ok45[j] && r.ok46[j];
    r.eigen_agrees[j] = positive == (lmin > 0.0);
    r.c_empirical = std::min(r.c_empirical, -ex * B * B);
    r.min_scaled_eig = std::min(r.min_scaled_eig, r.min_eig_scaled[j]);
  }
  return r;
}

}  // namespace sheath
