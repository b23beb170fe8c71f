#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "sheath/error.hpp"
#include "sheath/numerics.hpp"

namespace sheath {

/// Nondimensional constants of the ion fluid. The far-field density is fixed
/// at one so that the plasma is quasi-neutral at infinity.
struct PlasmaParams {
  double m = 1.0;
  double gamma = 5.0 / 3.0;
  double R = 1.0;
  double T_inf = 1.0;
  double u_inf = -2.0;
  double phi_b = 0.0;
  static constexpr double n_inf = 1.0;

  double sound_speed_sq() const { return gamma * R * T_inf / m; }
  double bohm_speed_sq() const { return (gamma * R * T_inf + 1.0) / m; }

  void validate() const {
    require(std::isfinite(m) && m > 0.0, ErrorKind::InvalidArgument, "m must be > 0");
    require(std::isfinite(gamma) && gamma > 1.0, ErrorKind::InvalidArgument, "gamma must be > 1");
    require(std::isfinite(R) && R > 0.0, ErrorKind::InvalidArgument, "R must be > 0");
    require(std::isfinite(T_inf) && T_inf > 0.0, ErrorKind::InvalidArgument, "T_inf must be > 0");
    require(std::isfinite(u_inf) && u_inf < 0.0, ErrorKind::InvalidArgument, "u_inf must be < 0");
    require(std::isfinite(phi_b), ErrorKind::InvalidArgument, "phi_b must be finite");
  }
};

/// Far-field velocity sitting exactly on the Bohm threshold.
inline double bohm_velocity(const PlasmaParams& p) { return -std::sqrt(p.bohm_speed_sq()); }

enum class Regime { SubsonicExistence, NoSolutionBand, DegenerateBohm, NondegenerateBohm };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::SubsonicExistence: return "SubsonicExistence";
    case Regime::NoSolutionBand: return "NoSolutionBand";
    case Regime::DegenerateBohm: return "DegenerateBohm";
    case Regime::NondegenerateBohm: return "NondegenerateBohm";
  }
  return "Unknown";
}

constexpr bool satisfies_bohm(Regime r) {
  return r == Regime::DegenerateBohm || r == Regime::NondegenerateBohm;
}

inline constexpr double kDegenerateRelTol = 1e-12;

/// Places u_inf^2 against the sound speed gamma R T_inf / m and the Bohm
/// speed (gamma R T_inf + 1) / m. The Bohm equality is matched within
/// `rel_tol` relative to the Bohm speed.
inline Regime classify_regime(const PlasmaParams& p, double rel_tol = kDegenerateRelTol) {
  p.validate();
  const double u2 = p.u_inf * p.u_inf;
  const double bohm = p.bohm_speed_sq();
  if (std::abs(u2 - bohm) <= rel_tol * bohm) return Regime::DegenerateBohm;
  if (u2 > bohm) return Regime::NondegenerateBohm;
  if (u2 <= p.sound_speed_sq()) return Regime::SubsonicExistence;
  return Regime::NoSolutionBand;
}

struct CharacteristicSpeeds {
  double lam1 = 0.0;
  double lam2 = 0.0;
  double lam3 = 0.0;
  double lam_extra = 0.0;  ///< m u1, repeated for the transverse components

  double max_abs() const {
    return std::max({std::abs(lam1), std::abs(lam2), std::abs(lam3), std::abs(lam_extra)});
  }
  double max_speed() const { return std::max({lam1, lam2, lam3, lam_extra}); }
};

/// Wave speeds of the hyperbolic part in the wall-normal direction.
inline CharacteristicSpeeds char_speeds(double u1, double T, const PlasmaParams& p) {
  require(std::isfinite(T) && T > 0.0, ErrorKind::InvalidArgument, "char_speeds: T must be > 0");
  require(std::isfinite(u1), ErrorKind::NonFinite, "char_speeds: non-finite velocity");
  const double radical =
      std::sqrt((p.m - 1.0) * (p.m - 1.0) * u1 * u1 + 4.0 * p.gamma * p.R * T);
  CharacteristicSpeeds s;
  s.lam1 = 0.5 * ((p.m + 1.0) * u1 - radical);
  s.lam2 = u1;
  s.lam3 = 0.5 * ((p.m + 1.0) * u1 + radical);
  s.lam_extra = p.m * u1;
  return s;
}

inline constexpr double kLambda0Lower = 4.0 + 1e-9;
inline constexpr double kLambda0Upper = 5.5694;
inline constexpr double kLambda0Tol = 1e-10;

/// Cubic whose root bounds the admissible algebraic weight exponent in the
/// degenerate stability estimate: l(l-1)(l-2) - 12(k l + 2) with k = 2/(1+gamma).
/// k = 1 is the gamma -> 1 limit.
inline double lambda0_cubic(double lambda, double k) {
  return lambda * (lambda - 1.0) * (lambda - 2.0) - 12.0 * (k * lambda + 2.0);
}

inline double solve_lambda0(double gamma) {
  require(std::isfinite(gamma) && gamma > 1.0, ErrorKind::InvalidArgument,
          "solve_lambda0: gamma must be > 1");
  const double k = 2.0 / (1.0 + gamma);
  return numerics::bisect([k](double l) { return lambda0_cubic(l, k); }, kLambda0Lower,
                          kLambda0Upper, kLambda0Tol);
}

/// Root of the limiting cubic l(l-1)(l-2) = 12(l+2), the upper end of the
/// lambda0 range (approx 5.5693).
inline double solve_lambda0_limit() {
  return numerics::bisect([](double l) { return lambda0_cubic(l, 1.0); }, kLambda0Lower,
                          kLambda0Upper, kLambda0Tol);
}

/// Constants of the algebraic sheath asymptotics at the Bohm threshold.
struct DegenerateConstants {
  double Gamma = 0.0;
  double c0 = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double G0 = 0.0;  ///< phi_b^{-1/2}

  double G(double x1) const { return Gamma * x1 + G0; }
  double c(int i) const {
    switch (i) {
      case 0: return c0;
      case 1: return c1;
      case 2: return c2;
      case 3: return c3;
      default: fail(ErrorKind::InvalidArgument, "DegenerateConstants: index must be 0..3");
    }
  }
};

inline double degenerate_gamma(const PlasmaParams& p) {
  return std::sqrt(((p.gamma * p.gamma + p.gamma) * p.R * p.T_inf + 2.0) / 12.0);
}

inline DegenerateConstants degenerate_constants(const PlasmaParams& p) {
  p.validate();
  require(p.phi_b > 0.0, ErrorKind::InvalidArgument,
          "degenerate_constants: phi_b must be > 0");
  DegenerateConstants d;
  d.Gamma = degenerate_gamma(p);
  d.c0 = 1.0;
  d.c1 = -2.0 * d.Gamma;
  d.c2 = 6.0 * d.Gamma * d.Gamma;
  d.c3 = -24.0 * d.Gamma * d.Gamma * d.Gamma;
  d.G0 = 1.0 / std::sqrt(p.phi_b);
  return d;
}

}  // namespace sheath
