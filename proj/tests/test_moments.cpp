#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "propest/errors.hpp"
#include "propest/moments.hpp"

using namespace propest;
using propest::testing::reference_design;
using propest::testing::rel_err;

namespace {

MseComponents reference_components(double alpha, double beta) {
  const auto dm = reference_design();
  return m_components(dm, t3_coefficients(alpha, beta, 1.0, 0.0, dm.summary.x_bar_pop));
}

DesignMoments with_rho(double rho) {
  auto dm = reference_design();
  dm.summary.rho_pb = rho;
  return dm;
}

}  // namespace

// Reference values below come from a separate double-precision script that
// evaluates the same closed forms from the published statistics.

TEST(VarUsual, Examples) {
  auto dm = reference_design();
  EXPECT_NEAR(var_usual(dm), 0.016846764404829545, 1e-15);
  EXPECT_LT(rel_err(var_usual(dm), 0.016847), 1e-4);
  dm.f = 0;
  EXPECT_EQ(var_usual(dm), 0.0);
  auto doubled = reference_design();
  doubled.summary.P *= 2;
  EXPECT_NEAR(var_usual(doubled), 4 * var_usual(reference_design()), 1e-15);
}

TEST(T1Moments, Examples) {
  const auto dm = reference_design();
  EXPECT_LT(rel_err(bias_t1(dm), -0.005927834493835228), 1e-12);
  EXPECT_LT(rel_err(bias_t1(dm), -0.0059280), 1e-4);
  EXPECT_LT(rel_err(mse_t1(dm), 0.008893620707254262), 1e-12);
  EXPECT_LT(rel_err(mse_t1(dm), 0.0088936), 1e-4);

  auto balanced = reference_design();
  balanced.summary.rho_pb = balanced.summary.c_x / balanced.summary.c_p;
  EXPECT_NEAR(bias_t1(balanced), 0.0, 1e-18);

  auto census = reference_design();
  census.f = 0;
  EXPECT_EQ(bias_t1(census), 0.0);

  EXPECT_GE(mse_t1(with_rho(0.0)), var_usual(with_rho(0.0)));
  auto no_aux = reference_design();
  no_aux.summary.c_x = 0;
  EXPECT_DOUBLE_EQ(mse_t1(no_aux), var_usual(no_aux));
}

TEST(T2Moments, BiasOfLinearDifferenceIsZero) {
  const auto dm = reference_design();
  EXPECT_EQ(bias_t2(dm, T2Instance(T2Family::linear_difference, -1.47, dm.P())), 0.0);
  auto census = dm;
  census.f = 0;
  EXPECT_EQ(bias_t2(census, T2Instance(T2Family::power_ratio, -1.0, dm.P())), 0.0);
}

TEST(T2Moments, PowerRatioMinusOneIsTheRatioEstimator) {
  const auto dm = reference_design();
  const T2Instance ratio(T2Family::power_ratio, -1.0, dm.P());
  EXPECT_LT(rel_err(bias_t2(dm, ratio), bias_t1(dm)), 1e-12);
  EXPECT_LT(rel_err(mse_t2(dm, ratio.h1()), mse_t1(dm)), 1e-12);

  // Weighting the cross term by h3 alone (half the mixed partial) gives a
  // different number; the enumeration test in test_sampling shows the full
  // mixed partial is the one that matches exact moments.
  const double cx = dm.summary.c_x;
  const double half_weight = dm.f * (ratio.h3() * dm.P() * dm.cross() + cx * cx * ratio.h2());
  EXPECT_LT(rel_err(half_weight, -0.0013174), 1e-3);
  EXPECT_GT(std::fabs(half_weight - bias_t2(dm, ratio)), 1e-3);
}

TEST(T2Moments, MseAndOptimum) {
  const auto dm = reference_design();
  EXPECT_EQ(mse_t2(dm, 0.0), var_usual(dm));
  EXPECT_LT(rel_err(mse_t2(dm, -dm.P()), mse_t1(dm)), 1e-12);
  EXPECT_LT(rel_err(opt_h1(dm), -1.4700187196110213), 1e-12);
  EXPECT_LT(rel_err(opt_h1(dm), -1.47002), 1e-5);
  EXPECT_LT(rel_err(mse_t2(dm, opt_h1(dm)), min_mse_t2(dm)), 1e-12);
  EXPECT_LT(rel_err(min_mse_t2(dm), 0.003291706143824049), 1e-12);
  EXPECT_LT(rel_err(min_mse_t2(dm), 0.0032918), 1e-4);

  EXPECT_EQ(opt_h1(with_rho(0.0)), 0.0);
  EXPECT_LT(opt_h1(with_rho(0.5)), 0.0);
  EXPECT_GT(opt_h1(with_rho(-0.5)), 0.0);
  EXPECT_EQ(min_mse_t2(with_rho(1.0)), 0.0);
  EXPECT_EQ(min_mse_t2(with_rho(-1.0)), 0.0);
  EXPECT_EQ(min_mse_t2(with_rho(0.0)), var_usual(dm));

  auto flat = dm;
  flat.summary.c_x = 0;
  EXPECT_THROW(opt_h1(flat), DegenerateAuxiliary);
}

TEST(T2Moments, MinimumBoundsRandomH1) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> h(-10.0, 10.0);
  const auto dm = reference_design();
  const double floor = min_mse_t2(dm);
  for (int i = 0; i < 100; ++i) EXPECT_GE(mse_t2(dm, h(gen)), floor);
  EXPECT_LE(floor, mse_t1(dm));
}

TEST(T3Coefficients, Examples) {
  auto c = t3_coefficients(1, 1, 1, 0, 14.4);
  EXPECT_EQ(c.theta, 1.0);
  EXPECT_EQ(c.b_coef, 1.5);
  EXPECT_EQ(c.a_coef, 1.875);
  c = t3_coefficients(1, 0, 1, 0, 14.4);
  EXPECT_EQ(c.b_coef, 1.0);
  EXPECT_EQ(c.a_coef, 1.0);
  c = t3_coefficients(1, 1, 2, 3, 14.4);
  EXPECT_NEAR(c.theta, 28.8 / 31.8, 1e-15);
  EXPECT_LT(c.theta, 1.0);
  EXPECT_THROW(t3_coefficients(1, 1, 1, 0, -2.0), DomainError);
}

TEST(MComponents, ReferenceStatisticsRatioMember) {
  const auto mc = reference_components(1, 0);
  EXPECT_LT(rel_err(mc.m1, 0.008893620707254262), 1e-12);
  EXPECT_LT(rel_err(mc.m2, 1.3007104887272731), 1e-12);
  EXPECT_LT(rel_err(mc.m3, -0.003112113109263495), 1e-12);
  EXPECT_LT(rel_err(mc.m4, 0.08536081671122729), 1e-12);
  EXPECT_LT(rel_err(mc.m5, -0.04742173656818183), 1e-12);
  EXPECT_LT(rel_err(mc.m1, 0.0088936), 1e-4);
  EXPECT_LT(rel_err(mc.m2, 1.30071), 1e-4);
  EXPECT_LT(rel_err(mc.m3, -0.0031121), 1e-4);
  EXPECT_LT(rel_err(mc.m4, 0.0853612), 1e-4);
  EXPECT_LT(rel_err(mc.m5, -0.0474217), 1e-4);

  const double P2 = 0.525 * 0.525;
  EXPECT_EQ(mc.d1, P2 + mc.m1 + 2 * mc.m3);
  EXPECT_EQ(mc.d2, -mc.m4 - mc.m5);
  EXPECT_EQ(mc.d3, mc.m2);
  EXPECT_EQ(mc.d4, P2 + mc.m3);
  EXPECT_EQ(mc.d5, -mc.m5);
  EXPECT_GT(mc.d1, 0.0);
  EXPECT_GT(mc.d3, 0.0);
}

TEST(MComponents, NoRatioAdjustmentAndCensus) {
  const auto dm = reference_design();
  const auto mc = m_components(dm, T3Coefficients{1.0, 0.0, 0.0});
  EXPECT_EQ(mc.m1, var_usual(dm));
  EXPECT_EQ(mc.m3, 0.0);
  EXPECT_EQ(mc.m5, 0.0);

  auto census = dm;
  census.f = 0;
  const auto zero = m_components(census, t3_coefficients(1, 1, 1, 0, 14.4));
  for (double m : {zero.m1, zero.m2, zero.m3, zero.m4, zero.m5}) EXPECT_EQ(m, 0.0);
  EXPECT_EQ(zero.d1, dm.P() * dm.P());
  EXPECT_EQ(zero.d4, dm.P() * dm.P());
}

TEST(MseT3At, Reductions) {
  const auto mc = reference_components(1, 1);
  EXPECT_NEAR(mse_t3_at(1, 0, 0.525, mc), mc.m1, 1e-18);
  const auto ratio = reference_components(1, 0);
  EXPECT_LT(rel_err(mse_t3_at(1, 0, 0.525, ratio), mse_t1(reference_design())), 1e-12);

  // Delta form equals the M form.
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> q(-3, 3);
  for (int i = 0; i < 50; ++i) {
    const double q1 = q(gen), q2 = q(gen), P = 0.525;
    const double delta_form = P * P + q1 * q1 * mc.d1 + q2 * q2 * mc.d3 + 2 * q1 * q2 * mc.d2 -
                              2 * q1 * mc.d4 - 2 * q2 * mc.d5;
    EXPECT_NEAR(mse_t3_at(q1, q2, P, mc), delta_form, 1e-12);
  }
}

TEST(OptQ, DecoupledSystem) {
  MseComponents mc;
  mc.d1 = 2.0;
  mc.d3 = 5.0;
  mc.d2 = 0.0;
  mc.d4 = 3.0;
  mc.d5 = -1.0;
  const auto q = opt_q(mc);
  EXPECT_DOUBLE_EQ(q.q1_star, 1.5);
  EXPECT_DOUBLE_EQ(q.q2_star, -0.2);
}

TEST(OptQ, SingularSystem) {
  MseComponents mc;
  mc.d1 = 1.0;
  mc.d2 = 2.0;
  mc.d3 = 4.0;
  EXPECT_THROW(opt_q(mc), SingularSystem);
  EXPECT_THROW(min_mse_t3(0.5, mc), SingularSystem);
  EXPECT_THROW(opt_q(MseComponents{}), SingularSystem);
}

TEST(OptQ, ReferenceStatistics) {
  const double P = 0.525;
  const double expected[3] = {0.00326617966036874, 0.0032526159321322745, 0.0032475897223431804};
  const double rough[3] = {0.003268, 0.003255, 0.003246};
  const double settings[3][2] = {{1, 1}, {1, 0}, {0, 1}};
  for (int i = 0; i < 3; ++i) {
    const auto mc = reference_components(settings[i][0], settings[i][1]);
    const auto q = opt_q(mc);
    EXPECT_LT(std::fabs(q.q1_star * mc.d1 + q.q2_star * mc.d2 - mc.d4), 1e-10);
    EXPECT_LT(std::fabs(q.q1_star * mc.d2 + q.q2_star * mc.d3 - mc.d5), 1e-10);
    EXPECT_LT(rel_err(mse_t3_at(q.q1_star, q.q2_star, P, mc), min_mse_t3(P, mc)), 1e-12);
    EXPECT_LT(rel_err(min_mse_t3(P, mc), expected[i]), 1e-10);
    EXPECT_LT(rel_err(min_mse_t3(P, mc), rough[i]), 1e-3);
  }
}

TEST(OptQ, TransposedNumeratorDoesNotSolveNormalEquations) {
  const auto mc = reference_components(1, 1);
  const double det = mc.determinant();
  const double printed_q1 = (mc.d1 * mc.d4 - mc.d2 * mc.d5) / det;
  const double q2 = opt_q(mc).q2_star;
  EXPECT_GT(std::fabs(printed_q1 * mc.d1 + q2 * mc.d2 - mc.d4), 1e-3);
  EXPECT_GT(mse_t3_at(printed_q1, q2, 0.525, mc), min_mse_t3(0.525, mc));
}

TEST(BiasT3, Examples) {
  const auto dm = reference_design();
  const auto ratio = t3_coefficients(1, 0, 1, 0, 14.4);
  EXPECT_LT(rel_err(bias_t3(dm, {1, 0, 1, 0, 1, 0}, ratio), bias_t1(dm)), 1e-12);
  EXPECT_EQ(bias_t3(dm, {1, 0, 0, 0, 1, 0}, T3Coefficients{1, 0, 0}), 0.0);
  const auto both = t3_coefficients(1, 1, 1, 0, 14.4);
  EXPECT_LT(rel_err(bias_t3(dm, {1, 0, 1, 1, 1, 0}, both), -0.007656810684289774), 1e-12);
  EXPECT_LT(rel_err(bias_t3(dm, {1, 0, 1, 1, 1, 0}, both), -0.0076584), 1e-3);
}

TEST(Pre, Examples) {
  const auto dm = reference_design();
  const double v = var_usual(dm);
  EXPECT_EQ(pre(v, v), 100.0);
  EXPECT_LT(rel_err(pre(v, min_mse_t2(dm)), 511.794), 1e-3);
  EXPECT_LT(rel_err(pre(v, mse_t1(dm)), 189.384), 1e-3);
  EXPECT_THROW(pre(v, 0.0), DivisionByZero);
}

TEST(Conditions, ReferenceStatistics) {
  const auto dm = reference_design();
  for (auto [a, b] : {std::pair{1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}}) {
    const auto mc = reference_components(a, b);
    EXPECT_TRUE(condition_t3_beats_usual(dm, mc));
    EXPECT_TRUE(condition_t3_beats_regression(dm, mc));
  }
  EXPECT_LE(min_mse_t3(0.525, reference_components(0, 1)), 0.003292);
}

TEST(Conditions, CensusAndPerfectCorrelation) {
  auto census = reference_design();
  census.f = 0;
  const auto mc = m_components(census, t3_coefficients(1, 1, 1, 0, 14.4));
  EXPECT_TRUE(condition_t3_beats_usual(census, mc));
  EXPECT_TRUE(condition_t3_beats_regression(census, mc));

  for (double rho : {1.0, -1.0}) {
    const auto dm = with_rho(rho);
    const auto perfect = m_components(dm, t3_coefficients(1, 1, 1, 0, 14.4));
    EXPECT_EQ(condition_t3_beats_regression(dm, perfect), min_mse_t3(dm.P(), perfect) <= 0.0);
  }
}

TEST(MomentProperty, RandomDesigns) {
  std::mt19937_64 gen(1234);
  std::uniform_real_distribution<double> step(-0.5, 0.5);
  for (int i = 0; i < 300; ++i) {
    const auto c = propest::testing::random_t3_case(gen);
    const double P = c.dm.P();
    const auto mc = m_components(c.dm, t3_coefficients(c.alpha, c.beta, c.a, c.b, c.dm.summary.x_bar_pop));
    ASSERT_GT(mc.d1, 0.0);
    ASSERT_GT(mc.determinant(), 0.0);
    const auto q = opt_q(mc);
    const double floor = min_mse_t3(P, mc);
    EXPECT_LT(rel_err(mse_t3_at(q.q1_star, q.q2_star, P, mc), floor), 1e-12);
    for (int k = 0; k < 20; ++k)
      EXPECT_GE(mse_t3_at(q.q1_star + step(gen), q.q2_star + step(gen) / c.dm.summary.x_bar_pop, P, mc), floor);
    EXPECT_TRUE(condition_t3_beats_usual(c.dm, mc));
    EXPECT_LE(min_mse_t2(c.dm), mse_t1(c.dm));
  }
}
