#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sheath/error.hpp"
#include "sheath/grid.hpp"

namespace sheath {

/// Read-only view of a field sampled on the tensor grid, stored line by
/// line (index k * nx + j, with j along x1).
struct FieldView {
  std::span<const double> data;
  std::size_t nx = 0;
  std::size_t ny = 1;

  double operator()(std::size_t j, std::size_t k) const { return data[k * nx + j]; }
  std::span<const double> line(std::size_t k) const { return data.subspan(k * nx, nx); }
};

/// Perturbations (varphi, psi, zeta, sigma) of (log n, u, T, phi) around the
/// stationary sheath. `psi` holds N velocity components, N = 1 on a planar
/// grid and N = 2 with a periodic transverse direction.
struct PerturbationState {
  double t = 0.0;
  std::size_t nx = 0;
  TransverseGrid transverse;
  std::vector<double> varphi;
  std::vector<std::vector<double>> psi;
  std::vector<double> zeta;
  std::vector<double> sigma;

  std::size_t ny() const { return transverse.ny; }
  std::size_t dim() const { return psi.size(); }
  std::size_t points() const { return nx * transverse.ny; }

  static PerturbationState zeros(std::size_t nx, TransverseGrid tr = {}) {
    require(nx >= 3 && tr.ny >= 1, ErrorKind::InvalidArgument, "state: grid too small");
    PerturbationState s;
    s.nx = nx;
    s.transverse = tr;
    const std::size_t n = nx * tr.ny;
    s.varphi.assign(n, 0.0);
    s.psi.assign(tr.active() ? 2 : 1, std::vector<double>(n, 0.0));
    s.zeta.assign(n, 0.0);
    s.sigma.assign(n, 0.0);
    return s;
  }

  FieldView view(const std::vector<double>& f) const { return {f, nx, transverse.ny}; }
};

/// Discretization knobs of the time stepper.
struct SchemeConfig {
  double cfl = 0.5;
  int spatial_order = 2;  ///< 1: first-order upwind, 2: minmod-limited upwind-biased
  int rk_stages = 2;      ///< 2: SSP-RK2, 3: SSP-RK3
  double t_end = 1.0;
  double output_cadence = 0.1;

  void validate() const {
    require(cfl > 0.0 && cfl <= 1.0, ErrorKind::InvalidArgument, "scheme.cfl must lie in (0, 1]");
    require(spatial_order == 1 || spatial_order == 2, ErrorKind::InvalidArgument,
            "scheme.spatial_order must be 1 or 2");
    require(rk_stages == 2 || rk_stages == 3, ErrorKind::InvalidArgument,
            "scheme.rk_stages must be 2 or 3");
    require(t_end >= 0.0, ErrorKind::InvalidArgument, "scheme.t_end must be >= 0");
    require(output_cadence > 0.0, ErrorKind::InvalidArgument, "scheme.output_cadence must be > 0");
  }
};

}  // namespace sheath
