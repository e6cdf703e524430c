#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "twostrain/equilibria.h"
#include "twostrain/errors.h"
#include "twostrain/model.h"

namespace {

using twostrain::State;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(Model, DerivedRates) {
  const auto p = fixtures::example(4).p;
  EXPECT_DOUBLE_EQ(p.lambda(), 0.03);
  EXPECT_DOUBLE_EQ(p.alpha1(), 0.19);
  EXPECT_DOUBLE_EQ(p.alpha2(), 0.21);
  EXPECT_NEAR(p.S0(), 6666.666666666667, 1e-9);
  EXPECT_DOUBLE_EQ(p.N_max(), 10000.0);
}

TEST(Model, ValidateRejectsBadParameters) {
  auto p = fixtures::example(1).p;
  p.mu = 0.0;
  EXPECT_THROW(p.validate(), twostrain::DomainError);
  p = fixtures::example(1).p;
  p.k = -1e-5;
  EXPECT_THROW(p.validate(), twostrain::DomainError);
  p = fixtures::example(1).p;
  p.Lambda = std::nan("");
  EXPECT_THROW(p.validate(), twostrain::DomainError);
}

TEST(Model, VectorFieldMatchesOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1.0, 2000.0);
  for (int n = 1; n <= 4; ++n) {
    const auto setup = fixtures::example(n);
    const auto model = fixtures::to_model(setup);
    for (int i = 0; i < 20; ++i) {
      const State x{u(rng), u(rng), u(rng), u(rng), {}};
      const auto f = twostrain::vector_field(model, x);
      const auto ref = oracle::rhs(setup, {x.S, x.V1, x.I1, x.I2});
      EXPECT_NEAR(f.S, ref[0], 1e-12 * std::max(1.0, std::abs(ref[0])));
      EXPECT_NEAR(f.V1, ref[1], 1e-12 * std::max(1.0, std::abs(ref[1])));
      EXPECT_NEAR(f.I1, ref[2], 1e-12 * std::max(1.0, std::abs(ref[2])));
      EXPECT_NEAR(f.I2, ref[3], 1e-12 * std::max(1.0, std::abs(ref[3])));
    }
  }
}

TEST(Model, RecruitmentOnly) {
  const auto f = twostrain::vector_field(fixtures::example_model(1), State{0, 0, 0, 0, {}});
  EXPECT_EQ(f.S, 200.0);
  EXPECT_EQ(f.V1, 0.0);
  EXPECT_EQ(f.I1, 0.0);
  EXPECT_EQ(f.I2, 0.0);
}

TEST(Model, RemovedClassIsAppendedWhenTracked) {
  const auto model = fixtures::example_model(4);
  const auto f = twostrain::vector_field(model, State{1000, 300, 40, 700, 25.0});
  ASSERT_TRUE(f.R.has_value());
  EXPECT_NEAR(*f.R, 0.07 * 40 + 0.09 * 700 - 0.02 * 25, 1e-12);
  EXPECT_FALSE(twostrain::vector_field(model, State{1000, 300, 40, 700, {}}).R);
}

TEST(Model, NonFiniteStateIsRejected) {
  EXPECT_THROW(twostrain::vector_field(fixtures::example_model(1),
                                       State{std::nan(""), 1, 1, 1, {}}),
               twostrain::DomainError);
}

TEST(Model, DiseaseFreeStateIsStationary) {
  for (int n = 1; n <= 4; ++n) {
    const auto model = fixtures::example_model(n);
    const State e0 = twostrain::disease_free(model).point;
    const auto f = twostrain::vector_field(model, e0);
    EXPECT_EQ(f.I1, 0.0);
    EXPECT_EQ(f.I2, 0.0);
    EXPECT_LE(std::abs(f.S), 1e-12 * e0.S);
    EXPECT_LE(std::abs(f.V1), 1e-12 * e0.V1);
  }
}

TEST(Model, PublishedCoexistencePointIsNearlyStationary) {
  EXPECT_LT(twostrain::residual_norm(fixtures::example_model(4), State{1133, 320, 44, 774, {}}),
            5e-2);
}

TEST(ModelProperty, TotalPopulationBalance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3000.0);
  for (int i = 0; i < 200; ++i) {
    const auto setup = oracle::random_setup(rng);
    const auto model = fixtures::to_model(setup);
    const auto& p = setup.p;
    const State x{u(rng), u(rng), u(rng), u(rng), {}};
    const auto f = twostrain::vector_field(model, x);
    const double N = x.total();
    const double expected = p.Lambda - p.mu * N - (p.v1 + p.gamma1) * x.I1 -
                            (p.v2 + p.gamma2) * x.I2;
    EXPECT_NEAR(f.S + f.V1 + f.I1 + f.I2, expected, 1e-12 * std::max(1.0, p.Lambda + p.mu * N));
  }
}

TEST(ModelProperty, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 3000.0);
  for (int i = 0; i < 100; ++i) {
    const auto setup = oracle::random_setup(rng);
    const auto model = fixtures::to_model(setup);
    const State x{u(rng), u(rng), u(rng), u(rng), {}};
    const twostrain::Mat4 J = twostrain::jacobian(model, x);
    const twostrain::Vec4 x0 = x.vec();
    for (int col = 0; col < 4; ++col) {
      auto component = [&](int row) {
        return [&, row](double v) {
          twostrain::Vec4 y = x0;
          y[col] = v;
          return twostrain::vector_field(model, State::from(y)).vec()[row];
        };
      };
      for (int row = 0; row < 4; ++row) {
        const double fd = oracle::derivative(component(row), x0[col], 1e-3 * x0[col]);
        const double scale = J.cwiseAbs().row(row).maxCoeff();
        EXPECT_LE(std::abs(J(row, col) - fd), 1e-5 * std::max(std::abs(fd), 1e-6 * scale))
            << "entry (" << row << ", " << col << ")";
      }
    }
  }
}

TEST(Model, JacobianBlockStructureAtDiseaseFree) {
  const auto model = fixtures::example_model(4);
  const auto th = twostrain::thresholds(model);
  const twostrain::Mat4 J = twostrain::jacobian(model, twostrain::disease_free(model).point);
  EXPECT_NEAR(J(2, 2), model.params.alpha1() * (th.R1 - 1.0), 1e-12);
  EXPECT_NEAR(J(3, 3), model.params.alpha2() * (th.R2 - 1.0), 1e-12);
  EXPECT_EQ(J(3, 2), 0.0);
  EXPECT_EQ(J(2, 3), 0.0);
  EXPECT_EQ(J(2, 0), 0.0);
  EXPECT_EQ(J(3, 0), 0.0);
}

TEST(Model, BilinearJacobianSigns) {
  auto setup = fixtures::example(2);
  setup.law2 = {oracle::Family::kBilinear, 2e-4, 0.0};
  const auto model = fixtures::to_model(setup);
  const State x{900, 4000, 300, 50, {}};
  const twostrain::Mat4 J = twostrain::jacobian(model, x);
  EXPECT_NEAR(J(2, 0), 2e-4 * 300, 1e-15);
  EXPECT_GT(J(2, 0), 0.0);
  EXPECT_NEAR(J(3, 1), model.params.k * 50, 1e-15);
  EXPECT_NEAR(J(2, 2), 2e-4 * 900 - model.params.alpha1(), 1e-15);
}

TEST(Thresholds, PublishedExamples) {
  auto th = twostrain::thresholds(fixtures::example_model(1));
  EXPECT_LT(rel(th.R1, 0.2632), 5e-4);
  EXPECT_LT(rel(th.R2, 0.7947), 5e-4);
  th = twostrain::thresholds(fixtures::example_model(4));
  EXPECT_LT(rel(th.R1, 7.0175), 5e-4);
  EXPECT_LT(rel(th.R2, 4.1270), 5e-4);
  EXPECT_DOUBLE_EQ(th.R0, std::max(th.R1, th.R2));
  EXPECT_FALSE(th.R2_bar.has_value());
}

TEST(Thresholds, NoVaccinationReducesToStrainTwoRatio) {
  auto setup = fixtures::example(3);
  setup.p.k = 0.0;
  setup.p.r = 0.0;
  const auto th = twostrain::thresholds(fixtures::to_model(setup));
  EXPECT_EQ(th.R2, th.sigma2 / setup.p.alpha2());
}

TEST(ThresholdsProperty, MatchClosedForms) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const auto setup = oracle::random_setup(rng);
    const auto th = twostrain::thresholds(fixtures::to_model(setup));
    const auto [R1, R2] = oracle::reproduction_numbers(setup);
    EXPECT_LT(rel(th.R1, R1), 1e-12);
    EXPECT_LT(rel(th.R2, R2), 1e-12);
  }
}

TEST(InvadedThresholds, PublishedExample) {
  const auto model = fixtures::example_model(4);
  const auto e1 = twostrain::solve_E1(model);
  const auto e2 = twostrain::solve_E2(model);
  ASSERT_TRUE(e1 && !e2.roots.empty());
  const auto [R2_bar, R1_tilde] = twostrain::invaded_thresholds(model, e1, e2.roots.front());
  ASSERT_TRUE(R2_bar && R1_tilde);
  EXPECT_LT(rel(*R2_bar, 3.555), 1e-3);
  EXPECT_LT(rel(*R1_tilde, 1.194), 1e-3);
}

TEST(InvadedThresholds, BilinearStrainOneAtStrainTwoEquilibrium) {
  auto setup = fixtures::example(4);
  setup.law1 = {oracle::Family::kBilinear, 2e-4, 0.0};
  const auto model = fixtures::to_model(setup);
  const auto e2 = twostrain::solve_E2(model);
  ASSERT_FALSE(e2.roots.empty());
  const auto [R2_bar, R1_tilde] = twostrain::invaded_thresholds(model, {}, e2.roots.front());
  EXPECT_FALSE(R2_bar.has_value());
  ASSERT_TRUE(R1_tilde.has_value());
  EXPECT_NEAR(*R1_tilde, 2e-4 * e2.roots.front().point.S / model.params.alpha1(), 1e-12);
}

TEST(InvadedThresholds, StaleEquilibriumIsRejected) {
  const auto model = fixtures::example_model(4);
  auto e1 = twostrain::solve_E1(model);
  ASSERT_TRUE(e1);
  e1->point.I1 *= 1.01;
  EXPECT_THROW(twostrain::invaded_thresholds(model, e1, {}), twostrain::PreconditionError);
}

TEST(InvadedThresholdsProperty, InvasionNumbersBoundedByBasicNumbers) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    const auto model = fixtures::to_model(oracle::random_setup(rng));
    const auto th = twostrain::thresholds(model);
    const auto e1 = twostrain::solve_E1(model);
    const auto e2 = twostrain::solve_E2(model);
    const auto [R2_bar, R1_tilde] = twostrain::invaded_thresholds(
        model, e1, e2.roots.empty() ? std::nullopt : std::optional(e2.roots.front()));
    if (R2_bar) {
      EXPECT_LE(*R2_bar, th.R2 + 1e-12);
      ++checked;
    }
    if (R1_tilde) {
      EXPECT_LE(*R1_tilde, th.R1 + 1e-12);
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

}  // namespace
