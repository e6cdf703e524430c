#include "twostrain/incidence.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "twostrain/errors.h"

namespace twostrain {
namespace {

void require_finite(double S, double I, const char* op) {
  if (!std::isfinite(S) || !std::isfinite(I)) {
    std::ostringstream msg;
    msg << op << ": non-finite argument (S=" << S << ", I=" << I << ")";
    throw DomainError(msg.str());
  }
}

double fd_step(double x) {
  return std::sqrt(std::numeric_limits<double>::epsilon()) *
         std::max(1.0, std::abs(x));
}

// Central difference in the interior; second-order forward difference when
// the stencil would cross zero, since F need not be defined for negative
// densities.
template <typename Fn>
double derivative(const Fn& fn, double x) {
  const double h = fd_step(x);
  if (x >= h) return (fn(x + h) - fn(x - h)) / (2.0 * h);
  return (-3.0 * fn(x) + 4.0 * fn(x + h) - fn(x + 2.0 * h)) / (2.0 * h);
}

constexpr double kLimitDelta = 1e-8;
constexpr double kLimitAgreement = 1e-4;

}  // namespace

std::string_view family_name(IncidenceFamily family) {
  switch (family) {
    case IncidenceFamily::kBilinear:
      return "bilinear";
    case IncidenceFamily::kSaturatedS:
      return "saturated_s";
    case IncidenceFamily::kSaturatedI2:
      return "saturated_i2";
    case IncidenceFamily::kCustom:
      return "custom";
  }
  return "unknown";
}

std::optional<IncidenceFamily> parse_family(std::string_view name) {
  if (name == "bilinear") return IncidenceFamily::kBilinear;
  if (name == "saturated_s") return IncidenceFamily::kSaturatedS;
  if (name == "saturated_i2") return IncidenceFamily::kSaturatedI2;
  return std::nullopt;
}

IncidenceSpec IncidenceSpec::make(IncidenceFamily family, double beta,
                                  double zeta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("incidence: beta must be finite and > 0");
  if (!(zeta >= 0.0) || !std::isfinite(zeta))
    throw DomainError("incidence: zeta must be finite and >= 0");
  return IncidenceSpec(family, beta, zeta);
}

IncidenceSpec IncidenceSpec::bilinear(double beta) {
  return make(IncidenceFamily::kBilinear, beta, 0.0);
}

IncidenceSpec IncidenceSpec::saturated_s(double beta, double zeta) {
  return make(IncidenceFamily::kSaturatedS, beta, zeta);
}

IncidenceSpec IncidenceSpec::saturated_i2(double beta, double zeta) {
  return make(IncidenceFamily::kSaturatedI2, beta, zeta);
}

IncidenceSpec IncidenceSpec::custom(Function F, Function dF_dS,
                                    Function dF_dI) {
  if (!F) throw DomainError("incidence: custom family requires F");
  IncidenceSpec spec(IncidenceFamily::kCustom, 0.0, 0.0);
  spec.custom_F_ = std::move(F);
  spec.custom_dF_dS_ = std::move(dF_dS);
  spec.custom_dF_dI_ = std::move(dF_dI);
  return spec;
}

double IncidenceSpec::F(double S, double I) const {
  require_finite(S, I, "F");
  switch (family_) {
    case IncidenceFamily::kBilinear:
      return beta_ * S * I;
    case IncidenceFamily::kSaturatedS:
      return beta_ * S * I / (1.0 + zeta_ * S);
    case IncidenceFamily::kSaturatedI2:
      return beta_ * S * I / (1.0 + zeta_ * I * I);
    case IncidenceFamily::kCustom:
      return custom_F_(S, I);
  }
  return 0.0;
}

double IncidenceSpec::custom_limit(double S) const {
  const double coarse = custom_F_(S, kLimitDelta) / kLimitDelta;
  const double fine = custom_F_(S, 0.5 * kLimitDelta) / (0.5 * kLimitDelta);
  if (!std::isfinite(coarse) || !std::isfinite(fine) ||
      std::abs(fine - coarse) >
          kLimitAgreement * std::max(std::abs(fine), std::abs(coarse))) {
    std::ostringstream msg;
    msg << "f: custom incidence has no stable I->0+ limit at S=" << S
        << " (F/I = " << coarse << " at delta, " << fine << " at delta/2)";
    throw UnsupportedLimitError(msg.str());
  }
  // Richardson extrapolation of the O(delta) one-sided quotient.
  return 2.0 * fine - coarse;
}

double IncidenceSpec::f(double S, double I) const {
  require_finite(S, I, "f");
  switch (family_) {
    case IncidenceFamily::kBilinear:
      return beta_ * S;
    case IncidenceFamily::kSaturatedS:
      return beta_ * S / (1.0 + zeta_ * S);
    case IncidenceFamily::kSaturatedI2:
      return beta_ * S / (1.0 + zeta_ * I * I);
    case IncidenceFamily::kCustom:
      if (I == 0.0) return custom_limit(S);
      return custom_F_(S, I) / I;
  }
  return 0.0;
}

double IncidenceSpec::g(double S, double I) const {
  require_finite(S, I, "g");
  if (S == 0.0) throw DomainError("g: undefined at S = 0");
  switch (family_) {
    case IncidenceFamily::kBilinear:
      return beta_;
    case IncidenceFamily::kSaturatedS:
      return beta_ / (1.0 + zeta_ * S);
    case IncidenceFamily::kSaturatedI2:
      return beta_ / (1.0 + zeta_ * I * I);
    case IncidenceFamily::kCustom:
      return f(S, I) / S;
  }
  return 0.0;
}

double IncidenceSpec::dF_dS(double S, double I) const {
  require_finite(S, I, "dF_dS");
  switch (family_) {
    case IncidenceFamily::kBilinear:
      return beta_ * I;
    case IncidenceFamily::kSaturatedS: {
      const double d = 1.0 + zeta_ * S;
      return beta_ * I / (d * d);
    }
    case IncidenceFamily::kSaturatedI2:
      return beta_ * I / (1.0 + zeta_ * I * I);
    case IncidenceFamily::kCustom:
      if (custom_dF_dS_) return custom_dF_dS_(S, I);
      return derivative([&](double s) { return custom_F_(s, I); }, S);
  }
  return 0.0;
}

double IncidenceSpec::dF_dI(double S, double I) const {
  require_finite(S, I, "dF_dI");
  switch (family_) {
    case IncidenceFamily::kBilinear:
      return beta_ * S;
    case IncidenceFamily::kSaturatedS:
      return beta_ * S / (1.0 + zeta_ * S);
    case IncidenceFamily::kSaturatedI2: {
      const double z = zeta_ * I * I;
      return beta_ * S * (1.0 - z) / ((1.0 + z) * (1.0 + z));
    }
    case IncidenceFamily::kCustom:
      if (custom_dF_dI_) return custom_dF_dI_(S, I);
      return derivative([&](double i) { return custom_F_(S, i); }, I);
  }
  return 0.0;
}

HypothesisReport check_hypotheses(const IncidenceSpec& spec, double S_max,
                                  double I_max, int n_grid) {
  if (!(S_max > 0.0) || !(I_max > 0.0))
    throw DomainError("check_hypotheses: S_max and I_max must be > 0");
  if (n_grid < 8) throw DomainError("check_hypotheses: n_grid must be >= 8");

  HypothesisReport report;
  auto fail = [](HypothesisResult& r, double S, double I, std::string what) {
    if (!r.passed) return;
    r.passed = false;
    r.first_violation = LatticePoint{S, I};
    r.detail = std::move(what);
  };

  const int n = n_grid;
  auto S_at = [&](int i) { return S_max * i / (n - 1); };
  auto I_at = [&](int j) { return I_max * j / (n - 1); };

  // H1
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double S = S_at(i), I = I_at(j);
      const double F = spec.F(S, I);
      if ((i == 0 || j == 0) && F != 0.0) {
        fail(report.h1, S, I, "F does not vanish on the boundary");
      } else if (!(F >= 0.0) || !std::isfinite(F)) {
        fail(report.h1, S, I, "F is negative or non-finite");
      }
    }
  }

  // f on the lattice; a missing I->0 limit is an H3 failure.
  std::vector<std::vector<std::optional<double>>> f(
      n, std::vector<std::optional<double>>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      try {
        f[i][j] = spec.f(S_at(i), I_at(j));
      } catch (const UnsupportedLimitError& e) {
        fail(report.h3, S_at(i), I_at(j), e.what());
      }
    }
  }

  // H3
  for (int i = 1; i < n; ++i) {
    const auto& lim = f[i][0];
    if (lim && !(*lim > 0.0 && std::isfinite(*lim)))
      fail(report.h3, S_at(i), 0.0, "limit of F/I is not positive");
  }

  // H2
  auto tol = [](double v) { return 1e-12 * std::max(1.0, std::abs(v)); };
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!f[i][j] || !f[i + 1][j]) continue;
      const double dS = *f[i + 1][j] - *f[i][j];
      if (dS < -tol(*f[i][j])) {
        report.h2_nonstrict = false;
        fail(report.h2, S_at(i), I_at(j), "f decreases in S");
      } else if (!(dS > 0.0)) {
        fail(report.h2, S_at(i), I_at(j), "f is not strictly increasing in S");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      if (!f[i][j] || !f[i][j + 1]) continue;
      if (*f[i][j + 1] - *f[i][j] > tol(*f[i][j])) {
        report.h2_nonstrict = false;
        fail(report.h2, S_at(i), I_at(j), "f increases in I");
      }
    }
  }

  // H4
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!f[i][j]) continue;
      const double S = S_at(i);
      double g = 0.0;
      try {
        g = spec.g(S, I_at(j));
      } catch (const Error& e) {
        fail(report.h4, S, I_at(j), e.what());
        continue;
      }
      if (!std::isfinite(g) || g < 0.0 ||
          std::abs(*f[i][j] - S * g) > tol(*f[i][j])) {
        fail(report.h4, S, I_at(j), "f != S g");
      }
    }
  }
  return report;
}

}  // namespace twostrain
