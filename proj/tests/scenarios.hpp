#pragma once

// Reference runs shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles/primitive_solver.hpp"
#include "sheath/dynamics.hpp"

namespace scenarios {

using namespace sheath;

inline PlasmaParams nondegenerate_reference() {
  PlasmaParams p;
  p.phi_b = 0.05;
  return p;
}

inline PlasmaParams degenerate_reference(double phi_b) {
  PlasmaParams p;
  p.phi_b = phi_b;
  p.u_inf = bohm_velocity(p);
  return p;
}

inline InitialSpec bump(double amplitude = 1e-3) {
  InitialSpec is;
  is.amplitude = amplitude;
  is.lambda = 0.5;
  is.width = 2.0;
  is.center = 4.0;
  return is;
}

/// Max difference at t = 1 between the perturbation stepper and the
/// primitive-variable oracle, over (log n, u, T).
inline double cross_solver_error(std::size_t M, double amplitude = 1e-3) {
  const PlasmaParams p = nondegenerate_reference();
  const auto grid = HalfLineGrid::stretched(default_length(p), M);
  const auto prof = build_profile(p, grid);
  const auto s0 = make_initial(bump(amplitude), prof);
  SchemeConfig sc;
  sc.t_end = 1.0;
  sc.output_cadence = 1.0;
  PerturbationState fin;
  evolve(s0, prof, p, sc, {}, &fin);

  const std::vector<double> x(grid.nodes().begin(), grid.nodes().end());
  oracle::PrimitiveSolver ps(x, {p.m, p.gamma, p.R, p.phi_b}, sc.cfl);
  ps.set_far_field(prof.n.back(), prof.u.back(), prof.T.back(), prof.phi.back());
  const std::size_t N = x.size();
  oracle::PrimitiveState q{std::vector<double>(N), std::vector<double>(N), std::vector<double>(N), prof.phi};
  for (std::size_t j = 0; j < N; ++j) {
    q.n[j] = std::exp(prof.v[j] + s0.varphi[j]);
    q.u[j] = prof.u[j] + s0.psi[0][j];
    q.T[j] = prof.T[j] + s0.zeta[j];
  }
  ps.advance(q, 1.0);
  double e = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    e = std::max(e, std::abs(std::log(q.n[j]) - prof.v[j] - fin.varphi[j]));
    e = std::max(e, std::abs(q.u[j] - prof.u[j] - fin.psi[0][j]));
    e = std::max(e, std::abs(q.T[j] - prof.T[j] - fin.zeta[j]));
  }
  return e;
}

/// Relative change of the t = 1 probe norm when the truncation length is
/// doubled on nested uniform grids (same spacing).
inline double length_doubling_change(std::size_t M = 1024) {
  const PlasmaParams p = nondegenerate_reference();
  const double L = default_length(p);
  double v[2];
  for (int r = 1; r <= 2; ++r) {
    const auto grid = HalfLineGrid::uniform(r * L, r * M);
    const auto prof = build_profile(p, grid);
    SchemeConfig sc;
    sc.t_end = 1.0;
    sc.output_cadence = 0.5;
    const std::vector<WeightSpec> probes{WeightSpec::exponential(0.5, 1, "exp")};
    const auto tr = evolve(make_initial(bump(), prof), prof, p, sc, probes);
    v[r - 1] = tr.norms[0].back();
  }
  return std::abs(v[1] - v[0]) / v[0];
}

/// Steps the zero perturbation and returns the largest value reached.
inline double zero_state_drift(std::size_t steps, std::size_t M = 256) {
  const PlasmaParams p = nondegenerate_reference();
  const auto prof = build_profile(p, HalfLineGrid::stretched(default_length(p), M));
  PerturbationState s = PerturbationState::zeros(prof.size());
  const SchemeConfig sc;
  double drift = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    s = step(s, prof, p, sc);
    for (const auto* f : {&s.varphi, &s.psi[0], &s.zeta, &s.sigma})
      for (double v : *f) drift = std::max(drift, std::abs(v));
  }
  return drift;
}

}  // namespace scenarios
