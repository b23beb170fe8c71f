#pragma once

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "sheath/error.hpp"
#include "sheath/model.hpp"

namespace sheath {

/// The Bernoulli-type map f(n) linking density and potential along the
/// stationary flow, its inverse on the branch through the far-field state
/// n = 1, and the Sagdeev potential V built from it.
///
/// Densities near the far field are handled through delta = n - 1 so that
/// f, f^{-1} and V' keep full relative accuracy as phi -> 0. For Bohm-type
/// flows (c_inf >= 1) the branch is (0, c_inf] where f decreases; for
/// subsonic flows it is [c_inf, inf) where f increases.
class SagdeevContext {
 public:
  static constexpr double kDomainSlack = 1e-14;

  explicit SagdeevContext(const PlasmaParams& params) : params_(params) {
    params_.validate();
    const double u2 = params_.u_inf * params_.u_inf;
    a_ = params_.gamma * params_.R * params_.T_inf / (params_.gamma - 1.0);
    b_ = 0.5 * params_.m * u2;
    c_inf_ = std::pow(params_.m * u2 / (params_.gamma * params_.R * params_.T_inf),
                      1.0 / (params_.gamma + 1.0));
    decreasing_ = c_inf_ >= 1.0;
    f_at_c_inf_ = f_of_delta(c_inf_ - 1.0);
  }

  const PlasmaParams& params() const { return params_; }
  double c_inf() const { return c_inf_; }
  double f_at_c_inf() const { return f_at_c_inf_; }
  /// True when the equilibrium branch is (0, c_inf].
  bool decreasing_branch() const { return decreasing_; }

  double f_of_n(double n) const {
    require(n > 0.0 && std::isfinite(n), ErrorKind::InvalidArgument, "f_of_n: n must be > 0");
    return f_of_delta(n - 1.0);
  }

  /// f(1 + delta) without cancellation for small delta.
  double f_of_delta(double delta) const {
    const double l = std::log1p(delta);
    return a_ * std::expm1((params_.gamma - 1.0) * l) + b_ * std::expm1(-2.0 * l);
  }

  double f_prime(double n) const {
    return params_.gamma * params_.R * params_.T_inf * std::pow(n, params_.gamma - 2.0) -
           2.0 * b_ / (n * n * n);
  }

  /// f'(1) = gamma R T_inf - m u_inf^2.
  double f_prime_at_one() const { return params_.gamma * params_.R * params_.T_inf - 2.0 * b_; }

  bool in_domain(double phi) const { return phi >= f_at_c_inf_ - kDomainSlack; }

  /// n - 1 for the density on the equilibrium branch with f(n) = phi.
  double f_inverse_delta(double phi) const {
    require(std::isfinite(phi), ErrorKind::NonFinite, "f_inverse: non-finite potential");
    if (!in_domain(phi))
      fail(ErrorKind::BranchExhausted,
           "f_inverse: phi below f(c_inf) has no density on the equilibrium branch");
    const double delta_c = c_inf_ - 1.0;
    if (phi <= f_at_c_inf_) return delta_c;
    if (phi == 0.0) return 0.0;

    // g is monotone on the branch: sign(g') = -1 on the decreasing branch.
    auto g = [&](double d) { return f_of_delta(d) - phi; };
    double lo, hi;
    if (decreasing_) {
      hi = delta_c;
      lo = -0.5;
      while (lo > -1.0 && g(lo) <= 0.0) lo = -1.0 + 0.5 * (lo + 1.0);
    } else {
      lo = delta_c;
      hi = 1.0;
      while (g(hi) <= 0.0) hi = 2.0 * hi + 1.0;
    }

    double d = std::clamp(0.0, lo, hi);
    const double fp1 = f_prime_at_one();
    if (fp1 != 0.0) d = phi / fp1;
    if (!(d > lo && d < hi)) d = 0.5 * (lo + hi);

    for (int it = 0; it < 200; ++it) {
      const double gd = g(d);
      if (gd == 0.0) return d;
      // Tighten the bracket using monotonicity.
      const bool right_of_root = decreasing_ ? gd < 0.0 : gd > 0.0;
      if (right_of_root)
        hi = d;
      else
        lo = d;
      const double slope = f_prime(1.0 + d);
      double next = d - gd / slope;
      if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
      const double step = next - d;
      d = next;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(d) ||
          hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(d), 1e-300))
        return d;
    }
    return d;
  }

  double f_inverse(double phi) const { return 1.0 + f_inverse_delta(phi); }

  /// V'(phi) = f^{-1}(phi) - e^{-phi}.
  double dV(double phi) const { return f_inverse_delta(phi) - std::expm1(-phi); }

  /// V''(phi) = (f^{-1})'(phi) + e^{-phi}.
  double d2V(double phi) const { return 1.0 / f_prime(f_inverse(phi)) + std::exp(-phi); }

  /// Closed form of V''(0) = 1 + 1/f'(1): positive for nondegenerate and
  /// subsonic flows, zero at the Bohm threshold.
  double d2V_at_zero() const { return 1.0 + 1.0 / f_prime_at_one(); }

  /// V(phi) = int_0^phi [f^{-1}(eta) - e^{-eta}] d eta by composite 16-point
  /// Gauss-Legendre with interval halving.
  double V(double phi, double abs_tol = 1e-12) const {
    require(std::isfinite(phi), ErrorKind::NonFinite, "V: non-finite potential");
    if (phi == 0.0) return 0.0;
    if (!in_domain(phi))
      fail(ErrorKind::BranchExhausted, "V: integration segment leaves the equilibrium branch");
    const double lo = std::min(0.0, phi), hi = std::max(0.0, phi);
    auto integrand = [this](double eta) { return dV(eta); };
    const double whole = gl16(integrand, lo, hi);
    // V' = delta - expm1(-eta) cancels to leading order near the far field,
    // so its values carry an absolute noise of a few eps * |eta|; the
    // tolerance never asks for more than that noise integrated over [0, phi].
    const double fp1 = std::abs(f_prime_at_one());
    const double scale = 1.0 + (fp1 > 1e-8 ? 1.0 / fp1 : 1e8);
    const double noise = 32.0 * std::numeric_limits<double>::epsilon() * 0.5 * phi * phi * scale;
    const double tol = std::max(std::min(abs_tol, 1e-14 * std::abs(whole)), noise);
    const double value = adaptive(integrand, lo, hi, whole, tol, 0);
    return phi > 0.0 ? value : -value;
  }

 private:
  static constexpr int kMaxDepth = 16;

  template <class F>
  static double gl16(F& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 16>::integrate(f, a, b);
  }

  template <class F>
  static double adaptive(F& f, double a, double b, double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gl16(f, a, mid);
    const double right = gl16(f, mid, b);
    const double refined = left + right;
    if (std::abs(refined - whole) <= tol || depth >= kMaxDepth) return refined;
    return adaptive(f, a, mid, left, 0.5 * tol, depth + 1) +
           adaptive(f, mid, b, right, 0.5 * tol, depth + 1);
  }

  PlasmaParams params_;
  double a_ = 0.0;
  double b_ = 0.0;
  double c_inf_ = 1.0;
  double f_at_c_inf_ = 0.0;
  bool decreasing_ = true;
};

struct ExistenceVerdict {
  bool exists_monotone = false;
  double cond_V = 0.0;  ///< V(phi_b); NaN when phi_b is off the branch
  double cond_f = 0.0;  ///< phi_b - f(c_inf)
  Regime regime = Regime::NondegenerateBohm;
};

inline bool admits_sheath(Regime r) { return r != Regime::NoSolutionBand; }

/// Solvability of the stationary boundary-value problem: an admissible
/// regime together with V(phi_b) >= 0 and phi_b >= f(c_inf).
inline ExistenceVerdict existence_check(const PlasmaParams& params) {
  const SagdeevContext ctx(params);
  ExistenceVerdict v;
  v.regime = classify_regime(params);
  v.cond_f = params.phi_b - ctx.f_at_c_inf();
  if (v.cond_f < 0.0) {
    v.cond_V = std::numeric_limits<double>::quiet_NaN();
    v.exists_monotone = false;
    return v;
  }
  v.cond_V = ctx.V(params.phi_b);
  v.exists_monotone = admits_sheath(v.regime) && v.cond_V >= 0.0;
  return v;
}

}  // namespace sheath
