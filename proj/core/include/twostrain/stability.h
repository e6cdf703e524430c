#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twostrain/equilibria.h"
#include "twostrain/equilibrium.h"
#include "twostrain/model.h"

namespace twostrain {

enum class Verdict { kLocallyStable, kUnstable, kInconclusive };

std::string_view verdict_name(Verdict verdict);

/// Real parts inside (-dead_band, dead_band) are treated as zero.
inline constexpr double kVerdictDeadBand = 1e-10;

using Spectrum = std::array<std::complex<double>, 4>;

struct NamedValue {
  std::string name;
  double value = 0.0;
};

/// A Routh-Hurwitz style inequality `value > 0`.
struct NamedCondition {
  std::string name;
  double value = 0.0;
  bool holds = false;
};

/// Characteristic-polynomial coefficients of the coupled block, the
/// inequalities tested on them, and the eigenvalue that splits off.
struct RouthHurwitz {
  std::vector<NamedValue> coefficients;
  std::vector<NamedCondition> conditions;
  std::optional<NamedValue> decoupled_eigenvalue;

  bool all_hold() const;
  /// Stable when every condition holds and the decoupled eigenvalue is below
  /// -dead_band; unstable when that eigenvalue exceeds dead_band or some
  /// condition is strictly negative; otherwise inconclusive.
  Verdict verdict() const;
};

struct GridScanSummary {
  double max_value = 0.0;
  State argmax;
  long n_points = 0;
  bool nonpositive_everywhere = true;
};

struct StabilityReport {
  EquilibriumKind kind = EquilibriumKind::E0;
  /// Spectrum from the generic eigensolver, sorted by decreasing real part.
  Spectrum eigenvalues{};
  /// Closed-form eigenvalues (E0 only).
  std::optional<Spectrum> closed_form;
  std::optional<RouthHurwitz> rh;
  /// Verdict of the closed-form / Routh-Hurwitz test.
  Verdict verdict = Verdict::kInconclusive;
  /// Verdict of the generic eigensolver on the same Jacobian.
  Verdict eigen_verdict = Verdict::kInconclusive;
  /// Condition values that produced `verdict`.
  std::string basis;
  std::optional<GridScanSummary> global_check;

  /// False only when both verdicts are definitive and differ.
  bool consistent() const;
};

struct EigenClassification {
  Spectrum eigenvalues{};
  Verdict verdict = Verdict::kInconclusive;
};

/// Dense eigensolver with the 1e-10 dead-band. Throws DomainError on
/// non-finite entries and NumericError if the solver does not converge.
EigenClassification eigen_classify(const Mat4& J);

/// Roots of x^4 + c1 x^3 + c2 x^2 + c3 x + c4 via the companion matrix.
Spectrum quartic_roots(double c1, double c2, double c3, double c4);

/// Closed-form spectrum {-lambda, -mu, alpha1 (R1 - 1), alpha2 (R2 - 1)}.
StabilityReport classify_E0(const Model& model);

/// Cubic a2, a1, a0 of the (S, V1, I1) block plus the decoupled eigenvalue
/// alpha2 (R2_bar - 1). Throws PreconditionError unless `e1` is a certified E1.
StabilityReport rh_E1(const Model& model, const Equilibrium& e1);

/// Cubic b2, b1, b0 of the (S, V1, I2) block plus the decoupled eigenvalue
/// alpha1 (R1_tilde - 1).
StabilityReport rh_E2(const Model& model, const Equilibrium& e2);

/// Quartic c1..c4 with the conditions c_i > 0, c1 c2 - c3 > 0 and
/// c1 c2 c3 - c3^2 - c1^2 c4 > 0.
StabilityReport rh_E3(const Model& model, const Equilibrium& e3);

/// Dispatches on `e.kind`.
StabilityReport classify(const Model& model, const Equilibrium& e);

/// Axis samples: `n` log-spaced points from 1e-6 * upper to upper inclusive.
std::vector<double> log_axis(double upper, int n);

/// 2 - F2(S~,I2~)/F2(S,I2~) + S F2(S~,I2~)/(S~ F2(S,I2~)) - V1/V1~ - S V1~/(S~ V1).
/// Throws DomainError unless S, V1 > 0.
double global_phi_E2(const Model& model, const Equilibrium& e2, double S,
                     double V1);

struct SurfacePoint {
  double S = 0.0;
  double V1 = 0.0;
  double value = 0.0;
};

/// Scans global_phi_E2 over the S x V1 grid. Axes must be strictly
/// positive. When `surface` is given every sample is appended to it.
GridScanSummary global_condition_E2(const Model& model, const Equilibrium& e2,
                                    std::span<const double> S_axis,
                                    std::span<const double> V1_axis,
                                    std::vector<SurfacePoint>* surface = nullptr);

/// Default Omega1 scan: log_axis(S0, n_grid) x log_axis(V10, n_grid).
GridScanSummary global_condition_E2(const Model& model, const Equilibrium& e2,
                                    int n_grid = 200,
                                    std::vector<SurfacePoint>* surface = nullptr);

void write_surface_csv(std::ostream& os, std::span<const SurfacePoint> surface);

/// The Lyapunov-derivative expression for E3 at an interior point.
/// Throws DomainError unless every component of `x` is > 0.
double global_expression_E3(const Model& model, const Equilibrium& e3,
                            const State& x);

GridScanSummary global_condition_E3(const Model& model, const Equilibrium& e3,
                                    std::span<const State> points);

/// Exhaustive mode: n_grid^4 log-spaced lattice over the box
/// [1e-6 b, b] per coordinate with b = (S0, V10, Lambda/alpha1,
/// Lambda/alpha2), keeping points with N <= Lambda/mu.
GridScanSummary global_condition_E3_lattice(const Model& model,
                                            const Equilibrium& e3, int n_grid);

}  // namespace twostrain
