#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "scenarios.hpp"

using namespace sheath;

namespace {

struct Reference {
  PlasmaParams p = scenarios::nondegenerate_reference();
  StationaryProfile prof;
  explicit Reference(std::size_t M) : prof(build_profile(p, HalfLineGrid::stretched(default_length(p), M))) {}
};

SchemeConfig until(double t_end, double cadence, double cfl = 0.5) {
  SchemeConfig sc;
  sc.t_end = t_end;
  sc.output_cadence = cadence;
  sc.cfl = cfl;
  return sc;
}

}  // namespace

TEST(Dynamics, ZeroStateStaysZero) { EXPECT_LT(scenarios::zero_state_drift(1000), 1e-14); }

TEST(Dynamics, InitialDataVanishAtTheFarEndAndSolvePoisson) {
  const Reference r(256);
  const auto s = make_initial(scenarios::bump(), r.prof);
  EXPECT_EQ(s.varphi.back(), 0.0);
  EXPECT_EQ(s.sigma.front(), 0.0);
  EXPECT_EQ(s.sigma.back(), 0.0);
  std::vector<double> F;
  EXPECT_LT(detail::poisson_residual(make_poisson_problem(r.prof, {}, s.varphi), s.sigma, F), 1e-11);
}

TEST(Dynamics, SeededJitterIsReproducible) {
  const Reference r(128);
  auto spec = scenarios::bump();
  spec.jitter = 1.0;
  spec.seed = 42;
  const auto a = make_initial(spec, r.prof), b = make_initial(spec, r.prof);
  EXPECT_EQ(a.varphi, b.varphi);
  spec.seed = 43;
  EXPECT_NE(make_initial(spec, r.prof).varphi, a.varphi);
}

TEST(Dynamics, EvolveIsBitwiseDeterministic) {
  const Reference r(256);
  const auto s0 = make_initial(scenarios::bump(), r.prof);
  const std::vector<WeightSpec> probes{WeightSpec::exponential(0.5, 1, "exp")};
  const auto a = evolve(s0, r.prof, r.p, until(1.0, 0.25), probes);
  const auto b = evolve(s0, r.prof, r.p, until(1.0, 0.25), probes);
  EXPECT_EQ(a.norms, b.norms);
  EXPECT_EQ(a.E0, b.E0);
}

TEST(Dynamics, LandsExactlyOnCadenceTimes) {
  const Reference r(128);
  const auto tr = evolve(make_initial(scenarios::bump(), r.prof), r.prof, r.p, until(1.0, 0.3), {});
  ASSERT_EQ(tr.rows(), 5u);
  EXPECT_EQ(tr.t[1], 0.3);
  EXPECT_EQ(tr.t.back(), 1.0);
}

TEST(Dynamics, CharacteristicsStayNegative) {
  const Reference r(256);
  const auto tr = evolve(make_initial(scenarios::bump(), r.prof), r.prof, r.p, until(2.0, 0.1), {});
  for (double s : tr.max_speed) EXPECT_LT(s, 0.0);
}

TEST(Dynamics, OutgoingFlowViolationIsReported) {
  const Reference r(128);
  auto s = PerturbationState::zeros(r.prof.size());
  s.psi[0][10] = 3.0;  // u1 = u~ + 3 > 0 near the wall
  try {
    scan_speeds(s, r.prof, r.p, 0.5);
    FAIL() << "expected a CharacteristicViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CharacteristicViolation);
  }
}

TEST(Dynamics, NonpositiveTemperatureIsANumericalFailure) {
  const Reference r(128);
  auto s = PerturbationState::zeros(r.prof.size());
  s.zeta[5] = -2.0;
  try {
    scan_speeds(s, r.prof, r.p, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NumericalBranchFailure);
    EXPECT_FALSE(is_precondition(e.kind()));
  }
}

TEST(Dynamics, AgreesWithPrimitiveFormSolverAtSecondOrder) {
  const double e256 = scenarios::cross_solver_error(256);
  const double e512 = scenarios::cross_solver_error(512);
  EXPECT_LT(e512, 1e-5);
  EXPECT_GE(e256 / e512, 3.5);
  EXPECT_LE(e256 / e512, 4.5);
}

TEST(Dynamics, HalvingTheTimeStepConvergesAtSecondOrder) {
  const Reference r(256);
  const auto s0 = make_initial(scenarios::bump(), r.prof);
  PerturbationState f[3];
  const double cfl[3] = {0.4, 0.2, 0.1};
  for (int i = 0; i < 3; ++i) evolve(s0, r.prof, r.p, until(1.0, 1.0, cfl[i]), {}, &f[i]);
  auto diff = [](const PerturbationState& a, const PerturbationState& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.varphi.size(); ++j) d = std::max(d, std::abs(a.varphi[j] - b.varphi[j]));
    return d;
  };
  const double d1 = diff(f[0], f[1]), d2 = diff(f[1], f[2]);
  EXPECT_GT(d1 / d2, 2.5);
}

TEST(Dynamics, TruncationLengthDoesNotMatter) { EXPECT_LT(scenarios::length_doubling_change(512), 5e-3); }

TEST(Dynamics, UniformTransverseDataReduceToThePlanarRun) {
  const Reference r(128);
  auto spec = scenarios::bump();
  spec.transverse_modulation = 0.0;
  const TransverseGrid tr{4, 2.0};
  const std::vector<WeightSpec> probes{WeightSpec::exponential(0.5, 1, "exp")};
  const auto planar = evolve(make_initial(spec, r.prof), r.prof, r.p, until(0.5, 0.5), probes);
  const auto wide = evolve(make_initial(spec, r.prof, tr), r.prof, r.p, until(0.5, 0.5), probes);
  EXPECT_NEAR(wide.norms[0].back(), std::sqrt(tr.Ly) * planar.norms[0].back(), 1e-5 * planar.norms[0].back());  // dt differs: transverse CFL term
}

TEST(Dynamics, TransverseModulationDecaysWithoutBlowUp) {
  const Reference r(128);
  const TransverseGrid tr{8, 2.0 * 3.14159265358979323846};
  const std::vector<WeightSpec> probes{WeightSpec::exponential(0.5, 1, "exp")};
  const auto t = evolve(make_initial(scenarios::bump(), r.prof, tr), r.prof, r.p, until(2.0, 0.5), probes);
  EXPECT_LT(t.norms[0].back(), t.norms[0].front());
  for (double s : t.max_speed) EXPECT_LT(s, 0.0);
}

TEST(Dynamics, ThirdOrderRungeKuttaAgreesWithSecondOrder) {
  const Reference r(256);
  const auto s0 = make_initial(scenarios::bump(), r.prof);
  auto sc3 = until(1.0, 1.0);
  sc3.rk_stages = 3;
  PerturbationState a, b;
  evolve(s0, r.prof, r.p, until(1.0, 1.0), {}, &a);
  evolve(s0, r.prof, r.p, sc3, {}, &b);
  for (std::size_t j = 0; j < a.varphi.size(); ++j) EXPECT_NEAR(a.varphi[j], b.varphi[j], 1e-6);
}
