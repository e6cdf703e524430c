#pragma once

#include <optional>

#include <Eigen/Core>

namespace twostrain {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// A point (S, V1, I1, I2) of the reduced system. The removed class R is
/// decoupled from the rest and is only carried when explicitly tracked.
struct State {
  double S = 0.0;
  double V1 = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  std::optional<double> R;

  Vec4 vec() const { return {S, V1, I1, I2}; }
  static State from(const Vec4& v) { return {v[0], v[1], v[2], v[3], {}}; }

  /// S + V1 + I1 + I2.
  double total() const { return S + V1 + I1 + I2; }

  friend bool operator==(const State&, const State&) = default;
};

/// Time derivative of a State; same layout.
using StateDerivative = State;

}  // namespace twostrain
