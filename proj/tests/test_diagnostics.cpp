#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/eigen3x3.hpp"
#include "sheath/diagnostics.hpp"

using namespace sheath;

namespace {

constexpr double kPi = 3.14159265358979323846;

double exp_norm_error(std::size_t M) {
  // f = e^{-x} with weight e^{x/2}, order 1: integrand 2 e^{-3x/2}.
  const double L = 20.0;
  const auto g = HalfLineGrid::uniform(L, M);
  std::vector<double> f(g.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = std::exp(-g[j]);
  const FieldView v{f, g.size(), 1};
  const double got = weighted_norm({&v, 1}, g, TransverseGrid{}, WeightSpec::exponential(0.5, 1)).value;
  const double exact = std::sqrt(2.0 * (1.0 - std::exp(-1.5 * L)) / 1.5);
  return std::abs(got - exact);
}

PlasmaParams degenerate(double phi_b) {
  PlasmaParams p;
  p.phi_b = phi_b;
  p.u_inf = bohm_velocity(p);
  return p;
}

std::vector<double> nodes(double L, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = L * double(j) / double(n - 1);
  return x;
}

}  // namespace

TEST(WeightedNorm, ExponentialWeightConvergesToClosedForm) {
  const double e1 = exp_norm_error(256), e2 = exp_norm_error(512);
  EXPECT_LT(e2, 1e-3);
  EXPECT_NEAR(e1 / e2, 4.0, 0.5);
}

TEST(WeightedNorm, AlgebraicWeightOfAConstant) {
  // f = 1, weight (1 + x)^1 on [0, 4]: integral 12, derivatives vanish.
  const auto g = HalfLineGrid::uniform(4.0, 128);
  const std::vector<double> f(g.size(), 1.0);
  const FieldView v{f, g.size(), 1};
  EXPECT_NEAR(weighted_norm({&v, 1}, g, {}, WeightSpec::algebraic(1.0, 1.0, 2)).value, std::sqrt(12.0), 1e-12);
}

TEST(WeightedNorm, TransverseModeIntegratesExactly) {
  // f = cos(x2) on a periodic grid: sum cos^2 dy = Ly / 2.
  const auto g = HalfLineGrid::uniform(1.0, 64);
  const TransverseGrid tr{16, 2.0 * kPi};
  std::vector<double> f(g.size() * tr.ny);
  for (std::size_t k = 0; k < tr.ny; ++k)
    for (std::size_t j = 0; j < g.size(); ++j) f[k * g.size() + j] = std::cos(double(k) * tr.dy());
  const FieldView v{f, g.size(), tr.ny};
  const auto w = WeightSpec::exponential(1e-12, 0);
  EXPECT_NEAR(weighted_norm({&v, 1}, g, tr, w).value, std::sqrt(kPi), 1e-9);
}

TEST(WeightedNorm, ClipsHugeWeightsAndSaysSo) {
  const auto g = HalfLineGrid::uniform(100.0, 64);
  const std::vector<double> f(g.size(), 1e-300);
  const FieldView v{f, g.size(), 1};
  const auto r = weighted_norm({&v, 1}, g, {}, WeightSpec::exponential(10.0, 0));
  EXPECT_TRUE(r.clipped);
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(WeightedNorm, RejectsBadOrder) {
  const auto g = HalfLineGrid::uniform(1.0, 64);
  const std::vector<double> f(g.size(), 0.0);
  const FieldView v{f, g.size(), 1};
  EXPECT_THROW(weighted_norm({&v, 1}, g, {}, WeightSpec::exponential(1.0, 4)), Error);
}

TEST(FitDecay, RecoversExactExponentialAndAlgebraicLaws) {
  std::vector<double> t, ye, ya;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(0.2 * i);
    ye.push_back(3.0 * std::exp(-0.7 * t.back()));
    ya.push_back(2.0 * std::pow(1.0 + 0.5 * t.back(), -1.3));
  }
  const auto fe = fit_decay(t, ye, DecayModel::Exponential);
  EXPECT_NEAR(fe.rate, 0.7, 1e-12);
  EXPECT_NEAR(fe.amplitude, 3.0, 1e-10);
  EXPECT_NEAR(fe.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(fe.t_lo, 2.0, 1e-12);
  const auto fa = fit_decay(t, ya, DecayModel::Algebraic, 0.5);
  EXPECT_NEAR(fa.rate, 1.3, 1e-12);
}

TEST(FitDecay, ShrinksAtNonpositiveValuesAndRefusesShortWindows) {
  std::vector<double> t, y;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(i);
    y.push_back(i < 40 ? std::exp(-0.1 * i) : 0.0);
  }
  const auto f = fit_decay(t, y, DecayModel::Exponential);
  EXPECT_TRUE(f.window_shrunk);
  EXPECT_EQ(f.t_hi, 39.0);
  EXPECT_THROW(fit_decay(std::span(t).first(5), std::span(y).first(5), DecayModel::Exponential, 1.0, 0.0),
               Error);
}

TEST(TheoremRate, DegenerateExponentIsAThird) {
  EXPECT_DOUBLE_EQ(theorem_rate(4.0, 1.0, TheoremCase::Degenerate), 1.0);
  EXPECT_DOUBLE_EQ(theorem_rate(4.0, 1.0, TheoremCase::NondegenerateAlgebraic), 3.0);
  EXPECT_THROW(theorem_rate(1.0, 2.0, TheoremCase::Degenerate), Error);
}

TEST(QForm, ReferenceIsPositiveDefiniteEverywhere) {
  const auto p = degenerate(1e-3);
  const double beta = degenerate_gamma(p) * std::sqrt(p.phi_b);
  const auto r = qform_check(4.0, beta, p, nodes(2000.0, 2001));
  EXPECT_TRUE(r.all44());
  EXPECT_TRUE(r.all45());
  EXPECT_TRUE(r.all46());
  EXPECT_TRUE(r.eigen_consistent());
  EXPECT_GT(r.c_empirical, 0.0);
  EXPECT_GT(r.min_scaled_eig, 0.0);
  EXPECT_TRUE(r.epsilon_below_lambda0);
}

TEST(QForm, EigenvaluesMatchTrigonometricOracle) {
  const auto p = degenerate(1e-3);
  const double beta = degenerate_gamma(p) * std::sqrt(p.phi_b);
  const double au = std::abs(p.u_inf);
  for (double eps : {1.0, 4.0, 5.5}) {
    const auto r = qform_check(eps, beta, p, nodes(500.0, 101));
    for (std::size_t j = 0; j < r.size(); ++j) {
      const oracle::Sym3 A{{{au * r.q1[j], 0.5 * r.q2[j], 0.0},
                            {0.5 * r.q2[j], r.q3[j] / au, 0.5 * r.q5[j]},
                            {0.0, 0.5 * r.q5[j], au * r.q4[j]}}};
      const auto e = oracle::sym3_eigenvalues(A);
      EXPECT_NEAR(r.min_eig[j], e[0], 1e-9 * std::max(1.0, std::abs(e[2])));
      EXPECT_EQ(r.ok44[j] && r.ok45[j] && r.ok46[j], e[0] > 0.0);
    }
  }
}

TEST(QForm, EpsilonWellAboveCriticalExponentFailsSomewhere) {
  const auto p = degenerate(1e-3);
  const double beta = degenerate_gamma(p) * std::sqrt(p.phi_b);
  const auto r = qform_check(solve_lambda0(p.gamma) + 1.0, beta, p, nodes(2000.0, 2001));
  EXPECT_FALSE(r.epsilon_below_lambda0);
  EXPECT_FALSE(r.all44() && r.all45() && r.all46());
  EXPECT_TRUE(r.eigen_consistent());
}

TEST(QForm, CriticalExponentIsSufficientNotSharp) {
  // The form stays definite somewhat beyond lambda0; the bound is safe.
  const auto x = nodes(2000.0, 2001);
  for (double g : {1.1, 5.0 / 3.0, 3.0}) {
    PlasmaParams p = degenerate(1e-3);
    p.gamma = g;
    p.u_inf = bohm_velocity(p);
    const double beta = degenerate_gamma(p) * std::sqrt(p.phi_b);
    const auto r = qform_check(solve_lambda0(g) * (1.0 - 1e-9), beta, p, x);
    EXPECT_TRUE(r.all44() && r.all45() && r.all46()) << g;
  }
}

TEST(QForm, Preconditions) {
  auto p = degenerate(1e-3);
  const double beta = degenerate_gamma(p) * std::sqrt(p.phi_b);
  const auto x = nodes(10.0, 11);
  EXPECT_THROW(qform_check(4.0, 2.0 * beta, p, x), Error);
  EXPECT_THROW(qform_check(-1.0, beta, p, x), Error);
  p.u_inf = -2.0;
  EXPECT_THROW(qform_check(4.0, beta, p, x), Error);
}
