#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "sheath/diagnostics.hpp"
#include "sheath/error.hpp"
#include "sheath/grid.hpp"
#include "sheath/numerics.hpp"

namespace sheath {

/// Nonlinear Poisson problem for the potential perturbation sigma:
///   Lap sigma = e^{phi + v~} - e^{v~} - e^{-(sigma + phi~)} + e^{-phi~},
/// with sigma = 0 at x1 = 0 and at the truncation point x1 = L.
///
/// This is a view: the grid and the arrays must outlive the problem. Fields
/// on a transverse grid are stored line by line, index k * nx + j.
struct PoissonProblem {
  const HalfLineGrid* grid = nullptr;
  TransverseGrid transverse;
  std::span<const double> v_t;    ///< log n~, length nx
  std::span<const double> phi_t;  ///< phi~, length nx
  std::span<const double> source; ///< varphi, length nx * ny

  std::size_t nx() const { return grid->size(); }
  std::size_t ny() const { return transverse.ny; }
};

struct PoissonOptions {
  double tol = 1e-11;
  int max_iter = 50;
  int max_halvings = 30;
};

struct PoissonSolution {
  std::vector<double> sigma;
  int iterations = 0;
  double final_residual = 0.0;
};

namespace detail {

inline void check_problem(const PoissonProblem& pb) {
  require(pb.grid != nullptr, ErrorKind::InvalidArgument, "poisson: missing grid");
  require(pb.transverse.ny >= 1 && pb.transverse.Ly > 0.0, ErrorKind::InvalidArgument,
          "poisson: bad transverse grid");
  require(pb.v_t.size() == pb.nx() && pb.phi_t.size() == pb.nx(), ErrorKind::InvalidArgument,
          "poisson: profile arrays do not match the grid");
  require(pb.source.size() == pb.nx() * pb.ny(), ErrorKind::InvalidArgument,
          "poisson: source does not match the grid");
  require(numerics::all_finite(pb.source), ErrorKind::NonFinite, "poisson: non-finite source");
}

/// F(sigma) at every node; zero on the Dirichlet ends.
inline double poisson_residual(const PoissonProblem& pb, std::span<const double> sigma,
                               std::vector<double>& F) {
  const auto& g = *pb.grid;
  const std::size_t nx = pb.nx(), ny = pb.ny();
  const bool tr = pb.transverse.active();
  const double idy2 = tr ? 1.0 / (pb.transverse.dy() * pb.transverse.dy()) : 0.0;
  F.assign(nx * ny, 0.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < ny; ++k) {
    const std::span<const double> line = sigma.subspan(k * nx, nx);
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      double lap = g.d2(line, j);
      if (tr) {
        const std::size_t kp = (k + 1) % ny, km = (k + ny - 1) % ny;
        lap += (sigma[kp * nx + j] - 2.0 * line[j] + sigma[km * nx + j]) * idy2;
      }
      const double s = line[j];
      const double value = lap - std::exp(pb.v_t[j]) * std::expm1(pb.source[k * nx + j]) +
                           std::exp(-pb.phi_t[j]) * std::expm1(-s);
      F[k * nx + j] = value;
      worst = std::max(worst, std::abs(value));
    }
  }
  return worst;
}

}  // namespace detail

/// Damped Newton iteration. In 1-D each step is an exact tridiagonal solve.
/// With a transverse direction the Jacobian's reaction term is replaced by
/// its x2-average so that the discrete Fourier modes decouple; the iteration
/// is then quasi-Newton but still converges to the exact discrete solution.
inline PoissonSolution poisson_solve(const PoissonProblem& pb, std::span<const double> guess = {},
                                     const PoissonOptions& opt = {}) {
  detail::check_problem(pb);
  const auto& g = *pb.grid;
  const std::size_t nx = pb.nx(), ny = pb.ny();
  const std::size_t n_in = nx - 2;

  PoissonSolution sol;
  sol.sigma.assign(nx * ny, 0.0);
  if (!guess.empty()) {
    require(guess.size() == nx * ny, ErrorKind::InvalidArgument, "poisson: guess size mismatch");
    require(numerics::all_finite(guess), ErrorKind::NonFinite, "poisson: non-finite guess");
    sol.sigma.assign(guess.begin(), guess.end());
  }
  for (std::size_t k = 0; k < ny; ++k) sol.sigma[k * nx] = sol.sigma[k * nx + nx - 1] = 0.0;

  std::vector<double> F, trial(nx * ny), Ftrial, delta(nx * ny);
  double res = detail::poisson_residual(pb, sol.sigma, F);

  std::vector<double> lower(n_in), diag(n_in), upper(n_in), rhs(n_in), reaction(nx);
  Eigen::FFT<double> fft;
  std::vector<double> row(ny);
  std::vector<std::complex<double>> spec(ny);
  std::vector<std::vector<std::complex<double>>> modes;

  while (res >= opt.tol) {
    if (sol.iterations >= opt.max_iter)
      fail(ErrorKind::NoConvergence, "poisson: Newton stalled at residual " + std::to_string(res) +
                                         " after " + std::to_string(sol.iterations) + " iterations");
    ++sol.iterations;

    // Reaction coefficient e^{-(sigma + phi~)}, averaged over x2 when needed.
    for (std::size_t j = 0; j < nx; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < ny; ++k) {
        const double d = std::exp(-(sol.sigma[k * nx + j] + pb.phi_t[j]));
        if (!(d > 0.0) || !std::isfinite(d))
          fail(ErrorKind::NonFinite, "poisson: Jacobian reaction term lost positivity at node " +
                                         std::to_string(j));
        acc += d;
      }
      reaction[j] = acc / static_cast<double>(ny);
    }

    auto assemble = [&](double shift) {
      for (std::size_t i = 0; i < n_in; ++i) {
        const std::size_t j = i + 1;
        const double hm = g.h(j), hp = g.h(j + 1);
        lower[i] = 2.0 / (hm * (hm + hp));
        upper[i] = 2.0 / (hp * (hm + hp));
        diag[i] = -lower[i] - upper[i] - reaction[j] - shift;
      }
    };

    if (ny == 1) {
      assemble(0.0);
      for (std::size_t i = 0; i < n_in; ++i) rhs[i] = -F[i + 1];
      numerics::solve_tridiagonal(lower, diag, upper, rhs);
      delta.assign(nx, 0.0);
      for (std::size_t i = 0; i < n_in; ++i) delta[i + 1] = rhs[i];
    } else {
      const double dy = pb.transverse.dy();
      modes.assign(nx, std::vector<std::complex<double>>(ny));
      for (std::size_t j = 1; j + 1 < nx; ++j) {
        for (std::size_t k = 0; k < ny; ++k) row[k] = -F[k * nx + j];
        fft.fwd(spec, row);
        modes[j] = spec;
      }
      std::vector<double> re(n_in), im(n_in);
      for (std::size_t q = 0; q < ny; ++q) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(q) / static_cast<double>(ny));
        assemble(4.0 * s * s / (dy * dy));
        for (std::size_t i = 0; i < n_in; ++i) {
          re[i] = modes[i + 1][q].real();
          im[i] = modes[i + 1][q].imag();
        }
        numerics::solve_tridiagonal(lower, diag, upper, re);
        numerics::solve_tridiagonal(lower, diag, upper, im);
        for (std::size_t i = 0; i < n_in; ++i) modes[i + 1][q] = {re[i], im[i]};
      }
      delta.assign(nx * ny, 0.0);
      for (std::size_t j = 1; j + 1 < nx; ++j) {
        fft.inv(row, modes[j]);
        for (std::size_t k = 0; k < ny; ++k) delta[k * nx + j] = row[k];
      }
    }

    // Halve the step until the residual norm decreases.
    double step = 1.0, res_trial = 0.0;
    for (int h = 0;; ++h) {
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = sol.sigma[i] + step * delta[i];
      res_trial = detail::poisson_residual(pb, trial, Ftrial);
      if (std::isfinite(res_trial) && res_trial < res) break;
      if (h >= opt.max_halvings) {
        if (res < 1e3 * opt.tol) {
          // Round-off floor: the residual cannot be reduced any further.
          sol.final_residual = res;
          return sol;
        }
        fail(ErrorKind::NoConvergence, "poisson: line search failed at residual " +
                                           std::to_string(res));
      }
      step *= 0.5;
    }
    sol.sigma.swap(trial);
    F.swap(Ftrial);
    res = res_trial;
  }
  sol.final_residual = res;
  return sol;
}

/// Weighted elliptic stability ratio ||sigma||_{w,2} / ||varphi||_{w,0}. A
/// vanishing source leaves the ratio undefined; it is reported as a NaN
/// with `defined == false`.
struct EllipticRatio {
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double sigma_norm = 0.0;
  double source_norm = 0.0;
  bool defined = false;
};

inline EllipticRatio elliptic_estimate_check(const PoissonProblem& pb, const PoissonSolution& sol,
                                             const WeightSpec& weight) {
  detail::check_problem(pb);
  WeightSpec w2 = weight, w0 = weight;
  w2.order = 2;
  w0.order = 0;
  const FieldView src{pb.source, pb.nx(), pb.ny()};
  const FieldView sig{sol.sigma, pb.nx(), pb.ny()};
  EllipticRatio r;
  r.source_norm = weighted_norm({&src, 1}, *pb.grid, pb.transverse, w0).value;
  r.sigma_norm = weighted_norm({&sig, 1}, *pb.grid, pb.transverse, w2).value;
  if (r.source_norm > 0.0) {
    r.ratio = r.sigma_norm / r.source_norm;
    r.defined = true;
  }
  return r;
}

}  // namespace sheath
