#pragma once

#include <optional>
#include <utility>

#include "twostrain/equilibrium.h"
#include "twostrain/incidence.h"
#include "twostrain/state.h"

namespace twostrain {

/// Primitive rates of the model. Transmission parameters live in the
/// per-strain IncidenceSpec.
struct ModelParams {
  double Lambda = 0.0;  // recruitment
  double mu = 0.0;      // natural death
  double r = 0.0;       // vaccination
  double k = 0.0;       // vaccinated -> strain 2 transmission
  double gamma1 = 0.0;  // recovery
  double gamma2 = 0.0;
  double v1 = 0.0;      // disease-induced death
  double v2 = 0.0;

  double lambda() const { return r + mu; }
  double alpha1() const { return gamma1 + v1 + mu; }
  double alpha2() const { return gamma2 + v2 + mu; }

  /// Disease-free susceptible density Lambda / lambda.
  double S0() const { return Lambda / lambda(); }
  /// Disease-free vaccinated density r Lambda / (mu lambda).
  double V10() const { return r * Lambda / (mu * lambda()); }
  /// Upper bound Lambda / mu of the total population in the invariant set.
  double N_max() const { return Lambda / mu; }

  /// Throws DomainError unless every field is finite and >= 0 with
  /// Lambda, mu > 0.
  void validate() const;
};

/// Parameters plus one incidence law per strain.
struct Model {
  ModelParams params;
  IncidenceSpec strain1;
  IncidenceSpec strain2;
};

struct Thresholds {
  double sigma1 = 0.0;  // dF1/dI1 at (S0, 0)
  double sigma2 = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double R0 = 0.0;
  /// Strain-2 invasion number at E1.
  std::optional<double> R2_bar;
  /// Strain-1 invasion number at E2.
  std::optional<double> R1_tilde;
};

/// Right-hand side of the reduced system. When `x.R` is set, the decoupled
/// dR/dt is appended.
StateDerivative vector_field(const Model& model, const State& x);

/// Max-norm of the (S, V1, I1, I2) components of vector_field.
double residual_norm(const Model& model, const State& x);

/// Analytic Jacobian, row/column order (S, V1, I1, I2).
Mat4 jacobian(const Model& model, const State& x);

/// sigma_i, R1, R2 and R0 = max(R1, R2). The invasion numbers are left unset.
Thresholds thresholds(const Model& model);

/// Invasion numbers from the single-strain equilibria. Absent inputs give
/// absent outputs; an equilibrium whose residual exceeds the certification
/// bound raises PreconditionError.
std::pair<std::optional<double>, std::optional<double>> invaded_thresholds(
    const Model& model, const std::optional<Equilibrium>& e1,
    const std::optional<Equilibrium>& e2);

}  // namespace twostrain
