#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace twostrain {

enum class IncidenceFamily {
  kBilinear,     // F = beta S I
  kSaturatedS,   // F = beta S I / (1 + zeta S)
  kSaturatedI2,  // F = beta S I / (1 + zeta I^2)
  kCustom,       // user-supplied F
};

std::string_view family_name(IncidenceFamily family);

/// Parses the scenario spelling (`bilinear`, `saturated_s`, `saturated_i2`).
std::optional<IncidenceFamily> parse_family(std::string_view name);

/// One strain's incidence rate F(S, I) together with the derived per-capita
/// force f = F / I and contact factor g = f / S.
///
/// Immutable after construction. Built-in families use closed forms for every
/// quantity; a custom family supplies F (and optionally its partials) and the
/// rest is obtained numerically.
class IncidenceSpec {
 public:
  using Function = std::function<double(double S, double I)>;

  static IncidenceSpec bilinear(double beta);
  static IncidenceSpec saturated_s(double beta, double zeta);
  static IncidenceSpec saturated_i2(double beta, double zeta);
  /// `dF_dS` / `dF_dI` may be empty, in which case central differences with
  /// h = sqrt(eps) * max(1, |x|) are used.
  static IncidenceSpec custom(Function F, Function dF_dS = {},
                              Function dF_dI = {});

  IncidenceFamily family() const { return family_; }
  double beta() const { return beta_; }
  double zeta() const { return zeta_; }

  /// Incidence rate. Exactly 0 when S == 0 or I == 0.
  double F(double S, double I) const;
  /// F / I, with the I -> 0+ limit at I == 0.
  double f(double S, double I) const;
  /// f / S. Throws DomainError at S == 0.
  double g(double S, double I) const;

  double dF_dS(double S, double I) const;
  double dF_dI(double S, double I) const;

 private:
  IncidenceSpec(IncidenceFamily family, double beta, double zeta)
      : family_(family), beta_(beta), zeta_(zeta) {}

  static IncidenceSpec make(IncidenceFamily family, double beta, double zeta);
  double custom_limit(double S) const;

  IncidenceFamily family_;
  double beta_ = 0.0;
  double zeta_ = 0.0;
  Function custom_F_;
  Function custom_dF_dS_;
  Function custom_dF_dI_;
};

struct LatticePoint {
  double S = 0.0;
  double I = 0.0;
};

struct HypothesisResult {
  bool passed = true;
  std::optional<LatticePoint> first_violation;
  std::string detail;
};

/// Lattice certification of the structural hypotheses on F. Passing is a
/// necessary-condition check only: the hypotheses are stated for every
/// (S, I) but only n_grid x n_grid points are visited.
struct HypothesisReport {
  HypothesisResult h1;  // F(S,0) = F(0,I) = 0, F >= 0
  HypothesisResult h2;  // df/dS > 0 and df/dI <= 0
  HypothesisResult h3;  // lim_{I->0+} F/I exists and is positive for S > 0
  HypothesisResult h4;  // f = S g with finite g
  /// df/dS >= 0 and df/dI <= 0 (h2 without strictness in S).
  bool h2_nonstrict = true;

  bool all_passed() const {
    return h1.passed && h2.passed && h3.passed && h4.passed;
  }
};

HypothesisReport check_hypotheses(const IncidenceSpec& spec, double S_max,
                                  double I_max, int n_grid);

}  // namespace twostrain
