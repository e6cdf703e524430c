#include <cmath>
#include <limits>
#include <vector>
#include <string>

#include <gtest/gtest.h>

#include "oracles.h"
#include "twostrain/errors.h"
#include "twostrain/incidence.h"

namespace {

using twostrain::IncidenceFamily;
using twostrain::IncidenceSpec;

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i)
    v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return v;
}

std::vector<IncidenceSpec> builtin_specs() {
  return {IncidenceSpec::bilinear(2e-4), IncidenceSpec::saturated_s(2e-4, 0.9),
          IncidenceSpec::saturated_s(2e-4, 1e-3), IncidenceSpec::saturated_i2(3e-5, 0.7),
          IncidenceSpec::saturated_i2(2e-4, 1e-4)};
}

TEST(Incidence, BilinearSubstitution) {
  const auto spec = IncidenceSpec::bilinear(0.5);
  EXPECT_DOUBLE_EQ(spec.F(2, 3), 3.0);
  EXPECT_DOUBLE_EQ(spec.dF_dS(2, 3), 1.5);
  EXPECT_DOUBLE_EQ(spec.dF_dI(2, 3), 1.0);
  EXPECT_DOUBLE_EQ(IncidenceSpec::bilinear(0.3).g(17, 4), 0.3);
}

TEST(Incidence, SaturatedSSubstitution) {
  const auto spec = IncidenceSpec::saturated_s(2e-4, 0.9);
  EXPECT_NEAR(spec.F(1000, 10), 2.0 / 901.0, 1e-15);
  EXPECT_NEAR(spec.dF_dS(1000, 10), 0.002 / (901.0 * 901.0), 1e-20);
  EXPECT_NEAR(IncidenceSpec::saturated_s(2e-4, 1e-3).g(1314, 5), 2e-4 / 2.314, 1e-12);
}

TEST(Incidence, SaturatedI2Substitution) {
  EXPECT_DOUBLE_EQ(IncidenceSpec::saturated_i2(1, 1).f(1, 1), 0.5);
  EXPECT_NEAR(IncidenceSpec::saturated_i2(2e-4, 1e-4).g(1133, 44), 2e-4 / 1.1936, 1e-12);
  EXPECT_DOUBLE_EQ(IncidenceSpec::saturated_i2(3e-5, 0.7).dF_dI(1500, 0), 3e-5 * 1500);
}

TEST(Incidence, ForceLimitAtZeroInfectives) {
  EXPECT_NEAR(IncidenceSpec::bilinear(2e-4).f(950, 0), 0.19, 1e-15);
  for (const auto& spec : builtin_specs()) {
    EXPECT_EQ(spec.F(5, 0), 0.0);
    EXPECT_EQ(spec.F(0, 3), 0.0);
    EXPECT_EQ(spec.f(0, 3), 0.0);
  }
}

TEST(Incidence, DomainErrors) {
  const auto spec = IncidenceSpec::bilinear(1.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(spec.F(nan, 1), twostrain::DomainError);
  EXPECT_THROW(spec.f(1, std::numeric_limits<double>::infinity()), twostrain::DomainError);
  EXPECT_THROW(spec.g(0, 1), twostrain::DomainError);
  EXPECT_THROW(IncidenceSpec::bilinear(0.0), twostrain::DomainError);
  EXPECT_THROW(IncidenceSpec::saturated_s(1.0, -1.0), twostrain::DomainError);
}

TEST(Incidence, ParseFamilyNames) {
  EXPECT_EQ(twostrain::parse_family("bilinear"), IncidenceFamily::kBilinear);
  EXPECT_EQ(twostrain::parse_family("saturated_s"), IncidenceFamily::kSaturatedS);
  EXPECT_EQ(twostrain::parse_family("saturated_i2"), IncidenceFamily::kSaturatedI2);
  EXPECT_FALSE(twostrain::parse_family("custom").has_value());
  for (auto fam : {IncidenceFamily::kBilinear, IncidenceFamily::kSaturatedS,
                   IncidenceFamily::kSaturatedI2})
    EXPECT_EQ(twostrain::parse_family(twostrain::family_name(fam)), fam);
}

TEST(IncidenceProperty, FactorisationIdentities) {
  for (const auto& spec : builtin_specs()) {
    for (double S : log_grid(1e-3, 1e4, 40)) {
      for (double I : log_grid(1e-3, 1e4, 40)) {
        const double F = spec.F(S, I), f = spec.f(S, I), g = spec.g(S, I);
        EXPECT_LE(std::abs(F - I * f), 1e-12 * std::max(1.0, std::abs(F)));
        EXPECT_LE(std::abs(f - S * g), 1e-12 * std::max(1.0, std::abs(f)));
      }
    }
  }
}

TEST(IncidenceProperty, PartialsMatchFiniteDifferences) {
  for (const auto& spec : builtin_specs()) {
    for (double S : log_grid(1e-2, 1e4, 25)) {
      for (double I : log_grid(1e-2, 1e4, 25)) {
        const double dS = oracle::derivative([&](double s) { return spec.F(s, I); }, S, 1e-3 * S);
        const double dI = oracle::derivative([&](double i) { return spec.F(S, i); }, I, 1e-3 * I);
        const double f = spec.f(S, I);
        EXPECT_LE(std::abs(spec.dF_dS(S, I) - dS), 1e-6 * (std::abs(dS) + f * I / S))
            << twostrain::family_name(spec.family()) << " S=" << S << " I=" << I;
        EXPECT_LE(std::abs(spec.dF_dI(S, I) - dI), 1e-6 * (std::abs(dI) + f))
            << twostrain::family_name(spec.family()) << " S=" << S << " I=" << I;
      }
    }
  }
}

TEST(IncidenceProperty, IncidenceSlopeBoundedByForce) {
  for (const auto& spec : builtin_specs())
    for (double S : log_grid(1e-2, 1e4, 30))
      for (double I : log_grid(1e-3, 1e4, 30))
        EXPECT_LE(spec.dF_dI(S, I), spec.f(S, I) + 1e-12);
}

TEST(Hypotheses, BuiltinFamiliesPass) {
  for (const auto& spec : builtin_specs()) {
    const auto report = twostrain::check_hypotheses(spec, 1e4, 1e4, 64);
    EXPECT_TRUE(report.all_passed()) << twostrain::family_name(spec.family()) << ": "
                                     << report.h2.detail;
    EXPECT_TRUE(report.h2_nonstrict);
  }
}

TEST(Hypotheses, ForceConstantInSFailsStrictMonotonicity) {
  const auto spec = IncidenceSpec::custom([](double, double I) { return 0.01 * I; });
  const auto report = twostrain::check_hypotheses(spec, 100, 100, 16);
  EXPECT_FALSE(report.h2.passed);
  ASSERT_TRUE(report.h2.first_violation.has_value());
  EXPECT_NE(report.h2.detail.find("strictly"), std::string::npos);
  EXPECT_TRUE(report.h2_nonstrict);
}

TEST(Incidence, CustomFamilyUsesNumericalPartials) {
  const auto custom = IncidenceSpec::custom(
      [](double S, double I) { return 2e-4 * S * I / (1.0 + 0.9 * S); });
  const auto ref = IncidenceSpec::saturated_s(2e-4, 0.9);
  for (double S : {0.0, 1e-6, 1.0, 1000.0}) {
    for (double I : {0.0, 1e-6, 10.0, 500.0}) {
      // Step sqrt(eps) max(1, x) leaves roundoff of order eps F / h.
      const double roundoff = 1e-8 * std::max(1.0, ref.F(S, I)) / std::max(1.0, S);
      EXPECT_NEAR(custom.dF_dS(S, I), ref.dF_dS(S, I), 1e-6 * ref.dF_dS(S, I) + roundoff);
      EXPECT_NEAR(custom.dF_dI(S, I), ref.dF_dI(S, I), 1e-6 * ref.dF_dI(S, I) + roundoff);
    }
  }
  EXPECT_NEAR(custom.f(1000, 0), ref.f(1000, 0), 1e-9 * ref.f(1000, 0));
}

TEST(Incidence, CustomFamilyWithoutLimitThrows) {
  const auto spec = IncidenceSpec::custom([](double S, double I) { return S * std::sqrt(I); });
  EXPECT_THROW(spec.f(1.0, 0.0), twostrain::UnsupportedLimitError);
}

}  // namespace
