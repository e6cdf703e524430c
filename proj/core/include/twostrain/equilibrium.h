#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "twostrain/state.h"

namespace twostrain {

enum class EquilibriumKind { E0, E1, E2, E3 };

std::string_view kind_name(EquilibriumKind kind);

/// One existence condition and the value that decided it.
struct ExistenceCondition {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool satisfied = false;
};

/// A residual-certified steady state of the reduced system.
struct Equilibrium {
  EquilibriumKind kind = EquilibriumKind::E0;
  State point;
  /// Max-norm of the vector field at `point`.
  double residual = 0.0;
  std::vector<ExistenceCondition> existence;
  std::string multiplicity_note;
};

/// Residual bound every returned equilibrium satisfies.
inline constexpr double kEquilibriumResidualTol = 1e-8;

}  // namespace twostrain
