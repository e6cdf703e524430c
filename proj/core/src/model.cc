#include "twostrain/model.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twostrain/errors.h"

namespace twostrain {

std::string_view kind_name(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::E0:
      return "E0";
    case EquilibriumKind::E1:
      return "E1";
    case EquilibriumKind::E2:
      return "E2";
    case EquilibriumKind::E3:
      return "E3";
  }
  return "?";
}

void ModelParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"Lambda", Lambda}, {"mu", mu},         {"r", r},   {"k", k},
      {"gamma1", gamma1}, {"gamma2", gamma2}, {"v1", v1}, {"v2", v2}};
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value) || value < 0.0) {
      std::ostringstream msg;
      msg << "params: " << name << " must be finite and >= 0 (got " << value
          << ")";
      throw DomainError(msg.str());
    }
  }
  if (!(Lambda > 0.0)) throw DomainError("params: Lambda must be > 0");
  if (!(mu > 0.0)) throw DomainError("params: mu must be > 0");
}

StateDerivative vector_field(const Model& model, const State& x) {
  if (!std::isfinite(x.S) || !std::isfinite(x.V1) || !std::isfinite(x.I1) ||
      !std::isfinite(x.I2) || (x.R && !std::isfinite(*x.R))) {
    throw DomainError("vector_field: non-finite state");
  }
  const ModelParams& p = model.params;
  const double F1 = model.strain1.F(x.S, x.I1);
  const double F2 = model.strain2.F(x.S, x.I2);

  StateDerivative dx;
  dx.S = p.Lambda - F1 - F2 - p.lambda() * x.S;
  dx.V1 = p.r * x.S - (p.mu + p.k * x.I2) * x.V1;
  dx.I1 = F1 - p.alpha1() * x.I1;
  dx.I2 = F2 + p.k * x.I2 * x.V1 - p.alpha2() * x.I2;
  if (x.R) dx.R = p.gamma1 * x.I1 + p.gamma2 * x.I2 - p.mu * *x.R;
  return dx;
}

double residual_norm(const Model& model, const State& x) {
  State reduced = x;
  reduced.R.reset();
  return vector_field(model, reduced).vec().cwiseAbs().maxCoeff();
}

Mat4 jacobian(const Model& model, const State& x) {
  if (!x.vec().allFinite()) throw DomainError("jacobian: non-finite state");
  const ModelParams& p = model.params;
  const double F1S = model.strain1.dF_dS(x.S, x.I1);
  const double F1I = model.strain1.dF_dI(x.S, x.I1);
  const double F2S = model.strain2.dF_dS(x.S, x.I2);
  const double F2I = model.strain2.dF_dI(x.S, x.I2);

  Mat4 J;
  // clang-format off
  J << -F1S - F2S - p.lambda(), 0.0,                 -F1I,             -F2I,
       p.r,                     -p.mu - p.k * x.I2,  0.0,              -p.k * x.V1,
       F1S,                     0.0,                 F1I - p.alpha1(), 0.0,
       F2S,                     p.k * x.I2,          0.0,              F2I + p.k * x.V1 - p.alpha2();
  // clang-format on
  return J;
}

Thresholds thresholds(const Model& model) {
  const ModelParams& p = model.params;
  const double S0 = p.S0();
  Thresholds t;
  t.sigma1 = model.strain1.dF_dI(S0, 0.0);
  t.sigma2 = model.strain2.dF_dI(S0, 0.0);
  t.R1 = t.sigma1 / p.alpha1();
  t.R2 = t.sigma2 / p.alpha2() +
         p.k * p.r * p.Lambda / (p.alpha2() * p.mu * p.lambda());
  t.R0 = std::max(t.R1, t.R2);
  return t;
}

namespace {

void require_certified(const Model& model, const Equilibrium& e) {
  const double res = residual_norm(model, e.point);
  if (!(res < kEquilibriumResidualTol)) {
    std::ostringstream msg;
    msg << kind_name(e.kind) << ": residual " << res
        << " exceeds certification bound " << kEquilibriumResidualTol;
    throw PreconditionError(msg.str());
  }
}

}  // namespace

std::pair<std::optional<double>, std::optional<double>> invaded_thresholds(
    const Model& model, const std::optional<Equilibrium>& e1,
    const std::optional<Equilibrium>& e2) {
  const ModelParams& p = model.params;
  std::optional<double> R2_bar;
  std::optional<double> R1_tilde;
  if (e1) {
    require_certified(model, *e1);
    R2_bar = model.strain2.dF_dI(e1->point.S, 0.0) / p.alpha2() +
             p.k * e1->point.V1 / p.alpha2();
  }
  if (e2) {
    require_certified(model, *e2);
    R1_tilde = model.strain1.dF_dI(e2->point.S, 0.0) / p.alpha1();
  }
  return {R2_bar, R1_tilde};
}

}  // namespace twostrain
