#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/dense_poisson.hpp"
#include "sheath/poisson.hpp"
#include "sheath/stationary.hpp"

using namespace sheath;

namespace {

struct Fixture {
  HalfLineGrid grid;
  StationaryProfile prof;
};

Fixture reference(std::size_t M, double L = 20.0) {
  PlasmaParams p;
  p.phi_b = 0.05;
  auto g = HalfLineGrid::uniform(L, M);
  return {g, build_profile(p, g)};
}

PoissonProblem problem(const Fixture& s, std::span<const double> src, TransverseGrid tr = {}) {
  PoissonProblem pb;
  pb.grid = &s.grid;
  pb.transverse = tr;
  pb.v_t = s.prof.v;
  pb.phi_t = s.prof.phi;
  pb.source = src;
  return pb;
}

// Source that makes sigma* = 1e-3 x (L - x) e^{-x} the exact solution of the
// continuous problem: e^{v}(e^{phi} - 1) = sigma*'' + e^{-phi~}(e^{-sigma*} - 1).
double manufactured_error(std::size_t M) {
  const Fixture s = reference(M);
  const double L = s.grid.length();
  std::vector<double> exact(s.grid.size()), src(s.grid.size(), 0.0);
  for (std::size_t j = 0; j < s.grid.size(); ++j) {
    const double x = s.grid[j];
    exact[j] = 1e-3 * x * (L - x) * std::exp(-x);
    const double d2 = 1e-3 * std::exp(-x) * (x * (L - x) - 2.0 * (L - 2.0 * x) - 2.0);
    const double rhs = d2 + std::exp(-s.prof.phi[j]) * std::expm1(-exact[j]);
    src[j] = std::log1p(rhs * std::exp(-s.prof.v[j]));
  }
  const auto sol = poisson_solve(problem(s, src));
  double err = 0.0;
  for (std::size_t j = 0; j < exact.size(); ++j) err = std::max(err, std::abs(sol.sigma[j] - exact[j]));
  return err;
}

oracle::DensePoisson dense_from(const Fixture& s, const std::vector<double>& src, std::size_t ny = 1,
                                double dy = 1.0) {
  oracle::DensePoisson d;
  d.x.assign(s.grid.nodes().begin(), s.grid.nodes().end());
  d.ny = ny;
  d.dy = dy;
  d.v = s.prof.v;
  d.phi_t = s.prof.phi;
  d.source = src;
  return d;
}

}  // namespace

TEST(Poisson, ManufacturedSolutionConvergesAtSecondOrder) {
  double prev = manufactured_error(128);
  for (std::size_t M : {256u, 512u, 1024u}) {
    const double e = manufactured_error(M);
    EXPECT_GE(prev / e, 3.5) << M;
    EXPECT_LE(prev / e, 4.5) << M;
    prev = e;
  }
}

TEST(Poisson, ZeroSourceGivesZeroPotential) {
  const Fixture s = reference(128);
  const std::vector<double> src(s.grid.size(), 0.0);
  const auto sol = poisson_solve(problem(s, src));
  for (double v : sol.sigma) EXPECT_EQ(v, 0.0);
}

TEST(Poisson, NewtonConvergesQuicklyForSmallSources) {
  const Fixture s = reference(256);
  std::vector<double> src(s.grid.size());
  for (std::size_t j = 0; j < src.size(); ++j) src[j] = 1e-2 * std::sin(0.7 * s.grid[j]) * std::exp(-0.1 * s.grid[j]);
  src.back() = 0.0;
  const auto sol = poisson_solve(problem(s, src));
  EXPECT_LE(sol.iterations, 8);
  EXPECT_LT(sol.final_residual, 1e-11);
}

TEST(Poisson, AgreesWithDenseFixedPointOracle) {
  const Fixture s = reference(64, 10.0);
  std::vector<double> src(s.grid.size());
  for (std::size_t j = 0; j < src.size(); ++j) src[j] = 5e-3 * std::exp(-0.5 * (s.grid[j] - 3.0) * (s.grid[j] - 3.0));
  const auto sol = poisson_solve(problem(s, src));
  const auto ref = dense_from(s, src).solve_fixed_point();
  for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_NEAR(sol.sigma[j], ref[j], 1e-10);
}

TEST(Poisson, TransverseSolveAgreesWithDenseNewton) {
  const Fixture s = reference(64, 10.0);
  const TransverseGrid tr{8, 2.0 * 3.14159265358979323846};
  const std::size_t nx = s.grid.size();
  std::vector<double> src(nx * tr.ny);
  for (std::size_t k = 0; k < tr.ny; ++k)
    for (std::size_t j = 0; j < nx; ++j)
      src[k * nx + j] = 1e-2 * std::exp(-0.5 * (s.grid[j] - 3.0) * (s.grid[j] - 3.0)) *
                        (1.0 + 0.5 * std::cos(double(k) * tr.dy()));
  const auto sol = poisson_solve(problem(s, src, tr));
  const auto ref = dense_from(s, src, tr.ny, tr.dy()).solve_newton();
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(sol.sigma[i], ref[i], 1e-10);
}

TEST(Poisson, RejectsMismatchedSource) {
  const Fixture s = reference(64);
  const std::vector<double> src(10, 0.0);
  EXPECT_THROW(poisson_solve(problem(s, src)), Error);
}

TEST(Poisson, EllipticEstimateRatioIsBounded) {
  const Fixture s = reference(256);
  std::vector<double> src(s.grid.size());
  for (std::size_t j = 0; j < src.size(); ++j) src[j] = 1e-3 * std::exp(-0.5 * (s.grid[j] - 4.0) * (s.grid[j] - 4.0));
  const auto pb = problem(s, src);
  const auto sol = poisson_solve(pb);
  const auto r = elliptic_estimate_check(pb, sol, WeightSpec::exponential(0.5, 0, "w"));
  ASSERT_TRUE(r.defined);
  EXPECT_GT(r.ratio, 0.0);
  EXPECT_LT(r.ratio, 10.0);
  const std::vector<double> zero(s.grid.size(), 0.0);
  const auto pz = problem(s, zero);
  EXPECT_FALSE(elliptic_estimate_check(pz, poisson_solve(pz), WeightSpec::exponential(0.5, 0, "w")).defined);
}
