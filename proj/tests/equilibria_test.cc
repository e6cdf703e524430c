#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "twostrain/equilibria.h"
#include "twostrain/errors.h"

namespace {

using twostrain::EquilibriumKind;
using twostrain::State;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

void expect_feasible(const twostrain::Model& model, const twostrain::Equilibrium& e) {
  EXPECT_LT(e.residual, twostrain::kEquilibriumResidualTol);
  EXPECT_LT(twostrain::residual_norm(model, e.point), twostrain::kEquilibriumResidualTol);
  EXPECT_GE(e.point.S, 0.0);
  EXPECT_GE(e.point.V1, 0.0);
  EXPECT_GE(e.point.I1, 0.0);
  EXPECT_GE(e.point.I2, 0.0);
  EXPECT_LE(e.point.total(), model.params.N_max() * (1 + 1e-12));
}

TEST(DiseaseFree, PublishedValues) {
  const auto e0 = twostrain::disease_free(fixtures::example_model(1));
  EXPECT_EQ(e0.kind, EquilibriumKind::E0);
  EXPECT_NEAR(e0.point.S, 1666.6666666666667, 1e-9);
  EXPECT_NEAR(e0.point.V1, 8333.333333333334, 1e-9);
  EXPECT_EQ(e0.point.I1, 0.0);
  EXPECT_EQ(e0.point.I2, 0.0);
  EXPECT_NEAR(twostrain::disease_free(fixtures::example_model(4)).point.S, 6666.67, 0.01);
}

TEST(DiseaseFree, NoVaccination) {
  auto setup = fixtures::example(1);
  setup.p.r = 0.0;
  const auto e0 = twostrain::disease_free(fixtures::to_model(setup));
  EXPECT_EQ(e0.point.V1, 0.0);
  EXPECT_DOUBLE_EQ(e0.point.S, 200 / 0.02);
}

TEST(BalanceFunctions, AnchorValues) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const auto model = fixtures::to_model(oracle::random_setup(rng));
    const auto& p = model.params;
    EXPECT_EQ(twostrain::G_of_I1(model, 0.0), 0.0);
    EXPECT_EQ(twostrain::H_of_I2(model, 0.0), 0.0);
    EXPECT_LT(rel(twostrain::G_of_I1(model, p.Lambda / p.alpha1()), -p.Lambda), 1e-9);
    EXPECT_LT(rel(twostrain::H_of_I2(model, p.Lambda / p.alpha2()), -p.Lambda), 1e-9);
  }
}

TEST(StrainOne, Example2AgainstOracle) {
  const auto setup = fixtures::example(2);
  const auto model = fixtures::to_model(setup);
  const auto e1 = twostrain::solve_E1(model);
  ASSERT_TRUE(e1);
  const auto ref = oracle::strain1_equilibrium(setup);
  EXPECT_LT(rel(e1->point.S, 950.0), 1e-3);
  EXPECT_LT(rel(e1->point.S, ref[0]), 1e-10);
  EXPECT_LT(rel(e1->point.V1, ref[1]), 1e-10);
  EXPECT_LT(rel(e1->point.I1, ref[2]), 1e-10);
  EXPECT_NEAR(e1->point.I1, (200 - 0.12 * 950) / 0.19, 1e-9);
  EXPECT_LT(e1->residual, 1e-10);
  EXPECT_EQ(e1->point.I2, 0.0);
}

TEST(StrainOne, AbsentBelowThreshold) {
  EXPECT_FALSE(twostrain::solve_E1(fixtures::example_model(1)));
}

TEST(StrainOneProperty, ExistenceMatchesThreshold) {
  std::mt19937_64 rng(29);
  int present = 0, absent = 0;
  while (present + absent < 200) {
    const auto setup = oracle::random_setup(rng);
    const auto model = fixtures::to_model(setup);
    const double R1 = twostrain::thresholds(model).R1;
    if (std::abs(R1 - 1.0) < 0.05) continue;
    const auto e1 = twostrain::solve_E1(model);
    EXPECT_EQ(e1.has_value(), R1 > 1.0) << "R1 = " << R1;
    if (e1) {
      ++present;
      expect_feasible(model, *e1);
      const auto ref = oracle::strain1_equilibrium(setup);
      EXPECT_LT(rel(e1->point.I1, ref[2]), 1e-8);
    } else {
      ++absent;
    }
  }
  EXPECT_GT(present, 10);
  EXPECT_GT(absent, 10);
}

TEST(StrainTwo, Example3PublishedValues) {
  const auto setup = fixtures::example(3);
  const auto e2 = twostrain::solve_E2(fixtures::to_model(setup));
  ASSERT_EQ(e2.roots.size(), 1u);
  const State& x = e2.roots.front().point;
  EXPECT_LT(rel(x.S, 1314), 1.5e-2);
  EXPECT_LT(rel(x.V1, 4814), 1.5e-2);
  EXPECT_LT(rel(x.I2, 368), 1e-2);
  const auto ref = oracle::strain2_equilibrium(setup);
  EXPECT_LT(rel(x.S, ref[0]), 1e-9);
  EXPECT_LT(rel(x.V1, ref[1]), 1e-9);
  EXPECT_LT(rel(x.I2, ref[2]), 1e-9);
  EXPECT_EQ(x.I1, 0.0);
}

TEST(StrainTwo, EmptyBelowThreshold) {
  EXPECT_TRUE(twostrain::solve_E2(fixtures::example_model(1)).roots.empty());
}

TEST(StrainTwo, WithoutCrossInfectionForceBalances) {
  auto setup = fixtures::example(3);
  setup.p.k = 0.0;
  setup.law2.beta = 1e-3;
  const auto model = fixtures::to_model(setup);
  const auto e2 = twostrain::solve_E2(model);
  ASSERT_EQ(e2.roots.size(), 1u);
  const State& x = e2.roots.front().point;
  EXPECT_NEAR(model.strain2.f(x.S, x.I2), model.params.alpha2(), 1e-10);
}

TEST(StrainTwo, DiscriminantAndUniquenessInterval) {
  const auto model = fixtures::example_model(3);
  const auto& p = model.params;
  const auto e2 = twostrain::solve_E2(model);
  EXPECT_NEAR(e2.discriminant,
              -p.alpha2() * p.r * p.mu - p.alpha2() * p.mu * p.mu + p.k * p.Lambda * p.r,
              1e-15);
  EXPECT_EQ(e2.uniqueness_interval.has_value(), e2.discriminant > 0);
}

TEST(StrainTwoProperty, UniqueRootWhenDiscriminantNegative) {
  std::mt19937_64 rng(31);
  int seen = 0;
  while (seen < 100) {
    const auto setup = oracle::random_setup(rng);
    const auto model = fixtures::to_model(setup);
    if (twostrain::thresholds(model).R2 <= 1.05) continue;
    const auto e2 = twostrain::solve_E2(model);
    if (e2.discriminant >= 0) continue;
    ++seen;
    ASSERT_EQ(e2.roots.size(), 1u);
    expect_feasible(model, e2.roots.front());
    const auto ref = oracle::strain2_equilibrium(setup);
    EXPECT_LT(rel(e2.roots.front().point.I2, ref[2]), 1e-8);
  }
}

TEST(Coexistence, Example4PublishedValues) {
  const auto model = fixtures::example_model(4);
  const auto set = twostrain::solve_all(model);
  ASSERT_TRUE(set.e3);
  const State& x = set.e3->point;
  EXPECT_LT(rel(x.S, 1133), 1.5e-2);
  EXPECT_LT(rel(x.V1, 320), 1.5e-2);
  EXPECT_LT(rel(x.I1, 44), 1.5e-2);
  EXPECT_LT(rel(x.I2, 774), 1.5e-2);
  EXPECT_LT(rel(model.strain1.f(x.S, x.I1), model.params.alpha1()), 1e-9);
  EXPECT_GT(x.I1, 0.0);
  EXPECT_GT(x.I2, 0.0);
  expect_feasible(model, *set.e3);
}

TEST(Coexistence, HintIsHonoured) {
  const auto model = fixtures::example_model(4);
  const auto e3 = twostrain::solve_E3(model, State{1100, 300, 50, 700, {}});
  ASSERT_TRUE(e3);
  EXPECT_LT(rel(e3->point.I2, 774.254), 1e-4);
}

TEST(Coexistence, AbsentWhenStrainTwoCannotInvade) {
  const auto set = twostrain::solve_all(fixtures::example_model(2));
  ASSERT_TRUE(set.thresholds.R2_bar);
  EXPECT_LT(*set.thresholds.R2_bar, 1.0);
  EXPECT_FALSE(set.e3);
}

TEST(SolveAll, ExistenceConditionsCiteThresholds) {
  const auto set = twostrain::solve_all(fixtures::example_model(4));
  ASSERT_TRUE(set.e1 && set.e3);
  ASSERT_FALSE(set.e1->existence.empty());
  EXPECT_DOUBLE_EQ(set.e1->existence.front().value, set.thresholds.R1);
  EXPECT_TRUE(set.e1->existence.front().satisfied);
  const auto all = set.all();
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0].kind, EquilibriumKind::E0);
  EXPECT_EQ(all[3].kind, EquilibriumKind::E3);
}

TEST(SolveAllProperty, EveryEquilibriumCertifiedAndFeasible) {
  std::mt19937_64 rng(37);
  int coexistence = 0;
  for (int i = 0; i < 200; ++i) {
    const auto model = fixtures::to_model(oracle::random_setup(rng));
    twostrain::EquilibriumSet set;
    try {
      set = twostrain::solve_all(model);
    } catch (const twostrain::SolverError& e) {
      ADD_FAILURE() << "draw " << i << ": " << e.what();
      continue;
    }
    for (const auto& e : set.all()) {
      expect_feasible(model, e);
      if (e.kind == EquilibriumKind::E0 || e.kind == EquilibriumKind::E1)
        EXPECT_EQ(e.point.I2, 0.0);
      if (e.kind == EquilibriumKind::E0 || e.kind == EquilibriumKind::E2)
        EXPECT_EQ(e.point.I1, 0.0);
    }
    if (set.e3) {
      ++coexistence;
      EXPECT_GT(set.e3->point.I1, 0.0);
      EXPECT_GT(set.e3->point.I2, 0.0);
    }
  }
  RecordProperty("coexistence_draws", coexistence);
}

}  // namespace
