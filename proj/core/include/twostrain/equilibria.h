#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "twostrain/equilibrium.h"
#include "twostrain/model.h"

namespace twostrain {

/// E0 = (Lambda/lambda, r Lambda/(mu lambda), 0, 0).
Equilibrium disease_free(const Model& model);

/// G(I1) = F1((Lambda - alpha1 I1)/lambda, I1) - alpha1 I1 on [0, Lambda/alpha1].
/// Its positive root is the I1 component of E1.
double G_of_I1(const Model& model, double I1);

/// The strain-1-only equilibrium, present iff R1 > 1.
std::optional<Equilibrium> solve_E1(const Model& model);

/// H(I2) on [0, Lambda/alpha2], whose positive roots give E2, with
/// S(I2) = (Lambda - alpha2 I2)(mu + k I2) / (lambda mu + mu k I2) and
/// V1(I2) = r S / (mu + k I2).
double H_of_I2(const Model& model, double I2);

struct E2Solution {
  std::vector<Equilibrium> roots;
  /// d = -alpha2 r mu - alpha2 mu^2 + k Lambda r. d < 0 guarantees a unique
  /// root; d > 0 only guarantees at most one root in `uniqueness_interval`.
  double discriminant = 0.0;
  std::optional<std::pair<double, double>> uniqueness_interval;
  /// Alternative uniqueness hypothesis dF2/dS <= I2, checked on a lattice
  /// over [0, S0] x [0, Lambda/alpha2]. Reported only.
  ExistenceCondition slope_bound;
};

inline constexpr int kDefaultE2Scan = 4096;

/// Strain-2-only equilibria. Empty when R2 <= 1; otherwise every root found
/// by a sign-change scan over n_scan subintervals followed by bisection.
E2Solution solve_E2(const Model& model, int n_scan = kDefaultE2Scan);

/// Coexistence equilibrium from the reduced (I1, I2) system
///   f1(S*, I1) = alpha1,  f2(S*, I2) + k V1* = alpha2
/// solved by damped Newton. Starts, in order: `hint`, (I1 of E1, I2 of E2),
/// the tail of a short simulation, then brackets from a nested monotone scan.
std::optional<Equilibrium> solve_E3(const Model& model,
                                    const std::optional<State>& hint = {});
std::optional<Equilibrium> solve_E3(const Model& model,
                                    const std::optional<Equilibrium>& e1,
                                    const E2Solution& e2,
                                    const std::optional<State>& hint = {});

/// Every admissible equilibrium plus the threshold numbers used to decide
/// existence (including the invasion numbers when E1/E2 exist).
struct EquilibriumSet {
  Thresholds thresholds;
  Equilibrium e0;
  std::optional<Equilibrium> e1;
  E2Solution e2;
  std::optional<Equilibrium> e3;

  /// E0, E1, each E2 root, E3 in that order.
  std::vector<Equilibrium> all() const;
};

EquilibriumSet solve_all(const Model& model,
                         const std::optional<State>& e3_hint = {});

}  // namespace twostrain
