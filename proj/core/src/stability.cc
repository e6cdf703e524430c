#include "twostrain/stability.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "twostrain/errors.h"
#include "twostrain/format.h"

namespace twostrain {
namespace {

Verdict verdict_from_real_part(double max_real) {
  if (max_real < -kVerdictDeadBand) return Verdict::kLocallyStable;
  if (max_real > kVerdictDeadBand) return Verdict::kUnstable;
  return Verdict::kInconclusive;
}

Verdict verdict_from_spectrum(const Spectrum& s) {
  double max_real = -std::numeric_limits<double>::infinity();
  for (const auto& z : s) max_real = std::max(max_real, z.real());
  return verdict_from_real_part(max_real);
}

void sort_spectrum(Spectrum& s) {
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

void require_kind(const Equilibrium& e, EquilibriumKind kind, const char* op) {
  if (e.kind != kind) {
    throw PreconditionError(std::string(op) + ": expected " +
                            std::string(kind_name(kind)) + ", got " +
                            std::string(kind_name(e.kind)));
  }
}

void require_certified(const Model& model, const Equilibrium& e,
                       const char* op) {
  const double res = residual_norm(model, e.point);
  if (!(res < kEquilibriumResidualTol)) {
    std::ostringstream msg;
    msg << op << ": equilibrium residual " << res << " exceeds "
        << kEquilibriumResidualTol;
    throw PreconditionError(msg.str());
  }
}

NamedCondition positive(std::string name, double value) {
  return {std::move(name), value, value > 0.0};
}

std::string describe(const RouthHurwitz& rh) {
  std::ostringstream os;
  os.precision(6);
  const char* sep = "";
  if (rh.decoupled_eigenvalue) {
    os << rh.decoupled_eigenvalue->name << " = " << rh.decoupled_eigenvalue->value;
    sep = "; ";
  }
  for (const auto& c : rh.conditions) {
    os << sep << c.name << " = " << c.value << (c.holds ? " > 0" : " <= 0");
    sep = "; ";
  }
  return os.str();
}

StabilityReport finish(const Model& model, EquilibriumKind kind,
                       const State& point, RouthHurwitz rh,
                       std::string basis_prefix) {
  StabilityReport report;
  report.kind = kind;
  const EigenClassification eig = eigen_classify(jacobian(model, point));
  report.eigenvalues = eig.eigenvalues;
  report.eigen_verdict = eig.verdict;
  report.verdict = rh.verdict();
  report.basis = std::move(basis_prefix) + describe(rh);
  report.rh = std::move(rh);
  return report;
}

}  // namespace

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::kLocallyStable:
      return "LocallyStable";
    case Verdict::kUnstable:
      return "Unstable";
    case Verdict::kInconclusive:
      return "Inconclusive";
  }
  return "?";
}

bool RouthHurwitz::all_hold() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const NamedCondition& c) { return c.holds; });
}

Verdict RouthHurwitz::verdict() const {
  const double decoupled = decoupled_eigenvalue
                               ? decoupled_eigenvalue->value
                               : -std::numeric_limits<double>::infinity();
  if (decoupled > kVerdictDeadBand) return Verdict::kUnstable;
  const bool violated =
      std::any_of(conditions.begin(), conditions.end(),
                  [](const NamedCondition& c) { return c.value < 0.0; });
  if (violated) return Verdict::kUnstable;
  if (all_hold() && decoupled < -kVerdictDeadBand) return Verdict::kLocallyStable;
  return Verdict::kInconclusive;
}

bool StabilityReport::consistent() const {
  if (verdict == Verdict::kInconclusive || eigen_verdict == Verdict::kInconclusive)
    return true;
  return verdict == eigen_verdict;
}

EigenClassification eigen_classify(const Mat4& J) {
  if (!J.allFinite()) throw DomainError("eigen_classify: non-finite matrix");
  Eigen::EigenSolver<Mat4> solver(J, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigen_classify: eigensolver did not converge");
  EigenClassification out;
  for (int i = 0; i < 4; ++i) out.eigenvalues[i] = solver.eigenvalues()[i];
  sort_spectrum(out.eigenvalues);
  out.verdict = verdict_from_spectrum(out.eigenvalues);
  return out;
}

Spectrum quartic_roots(double c1, double c2, double c3, double c4) {
  Mat4 companion = Mat4::Zero();
  companion.row(0) << -c1, -c2, -c3, -c4;
  companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
  return eigen_classify(companion).eigenvalues;
}

StabilityReport classify_E0(const Model& model) {
  const ModelParams& p = model.params;
  const Thresholds th = thresholds(model);
  Spectrum closed{std::complex<double>(-p.lambda()),
                  std::complex<double>(-p.mu),
                  std::complex<double>(p.alpha1() * (th.R1 - 1.0)),
                  std::complex<double>(p.alpha2() * (th.R2 - 1.0))};
  sort_spectrum(closed);

  StabilityReport report;
  report.kind = EquilibriumKind::E0;
  report.closed_form = closed;
  report.verdict = verdict_from_spectrum(closed);
  const EigenClassification eig =
      eigen_classify(jacobian(model, {p.S0(), p.V10(), 0.0, 0.0, {}}));
  report.eigenvalues = eig.eigenvalues;
  report.eigen_verdict = eig.verdict;

  std::ostringstream basis;
  basis.precision(6);
  basis << "R0 = " << th.R0 << " (R1 = " << th.R1 << ", R2 = " << th.R2
        << "); alpha1 (R1 - 1) = " << p.alpha1() * (th.R1 - 1.0)
        << ", alpha2 (R2 - 1) = " << p.alpha2() * (th.R2 - 1.0);
  report.basis = basis.str();
  return report;
}

StabilityReport rh_E1(const Model& model, const Equilibrium& e1) {
  require_kind(e1, EquilibriumKind::E1, "rh_E1");
  require_certified(model, e1, "rh_E1");
  const double mu = model.params.mu;
  const Mat4 J = jacobian(model, e1.point);
  const double A11 = J(0, 0), A13 = J(0, 2), A31 = J(2, 0), A33 = J(2, 2);
  const double A44 = J(3, 3);

  const double a2 = -(A11 - mu + A33);
  const double a1 = -mu * A11 - mu * A33 + A11 * A33 - A13 * A31;
  const double a0 = mu * A11 * A33 - mu * A13 * A31;

  RouthHurwitz rh;
  rh.coefficients = {{"a2", a2}, {"a1", a1}, {"a0", a0}};
  rh.conditions = {positive("a2", a2), positive("a1", a1), positive("a0", a0),
                   positive("a2*a1 - a0", a2 * a1 - a0)};
  rh.decoupled_eigenvalue = NamedValue{"alpha2 (R2_bar - 1)", A44};
  return finish(model, EquilibriumKind::E1, e1.point, std::move(rh), "");
}

StabilityReport rh_E2(const Model& model, const Equilibrium& e2) {
  require_kind(e2, EquilibriumKind::E2, "rh_E2");
  require_certified(model, e2, "rh_E2");
  const double r = model.params.r;
  const Mat4 J = jacobian(model, e2.point);
  const double B11 = J(0, 0), B14 = J(0, 3), B22 = J(1, 1), B24 = J(1, 3);
  const double B41 = J(3, 0), B42 = J(3, 1), B44 = J(3, 3);
  const double B33 = J(2, 2);

  const double b2 = -(B11 + B22 + B44);
  const double b1 = B22 * B11 + B22 * B44 + B11 * B44 - B14 * B41 - B24 * B42;
  const double b0 = -B22 * B11 * B44 - r * B14 * B42 + B14 * B22 * B41 +
                    B11 * B24 * B42;

  RouthHurwitz rh;
  rh.coefficients = {{"b2", b2}, {"b1", b1}, {"b0", b0}};
  rh.conditions = {positive("b2", b2), positive("b1", b1), positive("b0", b0),
                   positive("b2*b1 - b0", b2 * b1 - b0)};
  rh.decoupled_eigenvalue = NamedValue{"alpha1 (R1_tilde - 1)", B33};

  const double dF2_dI2 = model.strain2.dF_dI(e2.point.S, e2.point.I2);
  std::ostringstream prefix;
  prefix.precision(6);
  prefix << "dF2/dI2 at E2 = " << dF2_dI2
         << (dF2_dI2 > 0.0 ? " > 0, explicit b-condition test; "
                           : " <= 0, b-conditions implied; ");
  return finish(model, EquilibriumKind::E2, e2.point, std::move(rh),
                prefix.str());
}

StabilityReport rh_E3(const Model& model, const Equilibrium& e3) {
  require_kind(e3, EquilibriumKind::E3, "rh_E3");
  require_certified(model, e3, "rh_E3");
  const double r = model.params.r;
  const Mat4 J = jacobian(model, e3.point);
  const double C11 = J(0, 0), C13 = J(0, 2), C14 = J(0, 3);
  const double C22 = J(1, 1), C24 = J(1, 3);
  const double C31 = J(2, 0), C33 = J(2, 2);
  const double C41 = J(3, 0), C42 = J(3, 1), C44 = J(3, 3);

  const double c1 = -C44 - C33 - C22 - C11;
  const double c2 = -C41 * C14 - C42 * C24 + C44 * C33 + C44 * C22 +
                    C44 * C11 - C31 * C13 + C33 * C22 + C33 * C11 + C22 * C11;
  const double c3 = -r * C42 * C14 + C41 * C14 * C33 + C41 * C14 * C22 +
                    C42 * C24 * C33 + C42 * C24 * C11 + C44 * C31 * C13 -
                    C44 * C33 * C22 - C44 * C33 * C11 - C44 * C22 * C11 +
                    C31 * C13 * C22 - C33 * C22 * C11;
  const double c4 = r * C42 * C14 * C33 - C41 * C14 * C33 * C22 +
                    C42 * C24 * C31 * C13 - C42 * C24 * C33 * C11 -
                    C44 * C31 * C13 * C22 + C44 * C33 * C22 * C11;

  RouthHurwitz rh;
  rh.coefficients = {{"c1", c1}, {"c2", c2}, {"c3", c3}, {"c4", c4}};
  rh.conditions = {positive("c1", c1),
                   positive("c2", c2),
                   positive("c3", c3),
                   positive("c4", c4),
                   positive("c1*c2 - c3", c1 * c2 - c3),
                   positive("c1*c2*c3 - c3^2 - c1^2*c4",
                            c1 * c2 * c3 - c3 * c3 - c1 * c1 * c4)};
  return finish(model, EquilibriumKind::E3, e3.point, std::move(rh), "");
}

StabilityReport classify(const Model& model, const Equilibrium& e) {
  switch (e.kind) {
    case EquilibriumKind::E0:
      return classify_E0(model);
    case EquilibriumKind::E1:
      return rh_E1(model, e);
    case EquilibriumKind::E2:
      return rh_E2(model, e);
    case EquilibriumKind::E3:
      return rh_E3(model, e);
  }
  throw PreconditionError("classify: unknown equilibrium kind");
}

std::vector<double> log_axis(double upper, int n) {
  if (!(upper > 0.0) || !std::isfinite(upper))
    throw DomainError("log_axis: upper bound must be finite and > 0");
  if (n < 2) throw DomainError("log_axis: need at least 2 points");
  const double lo = std::log(1e-6 * upper);
  const double hi = std::log(upper);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (n - 1));
  out.front() = 1e-6 * upper;
  out.back() = upper;
  return out;
}

double global_phi_E2(const Model& model, const Equilibrium& e2, double S,
                     double V1) {
  if (!(S > 0.0) || !(V1 > 0.0))
    throw DomainError("global_phi_E2: S and V1 must be > 0");
  const double St = e2.point.S, Vt = e2.point.V1, It = e2.point.I2;
  if (!(St > 0.0) || !(Vt > 0.0) || !(It > 0.0))
    throw DomainError("global_phi_E2: E2 must have S, V1, I2 > 0");
  const double F_eq = model.strain2.F(St, It);
  const double F_here = model.strain2.F(S, It);
  return 2.0 - F_eq / F_here + S * F_eq / (St * F_here) - V1 / Vt -
         S * Vt / (St * V1);
}

GridScanSummary global_condition_E2(const Model& model, const Equilibrium& e2,
                                    std::span<const double> S_axis,
                                    std::span<const double> V1_axis,
                                    std::vector<SurfacePoint>* surface) {
  require_kind(e2, EquilibriumKind::E2, "global_condition_E2");
  require_certified(model, e2, "global_condition_E2");
  GridScanSummary summary;
  summary.max_value = -std::numeric_limits<double>::infinity();
  for (const double S : S_axis) {
    for (const double V1 : V1_axis) {
      const double phi = global_phi_E2(model, e2, S, V1);
      ++summary.n_points;
      if (phi > summary.max_value) {
        summary.max_value = phi;
        summary.argmax = {S, V1, 0.0, e2.point.I2, {}};
      }
      if (surface) surface->push_back({S, V1, phi});
    }
  }
  summary.nonpositive_everywhere = summary.max_value <= 0.0;
  return summary;
}

GridScanSummary global_condition_E2(const Model& model, const Equilibrium& e2,
                                    int n_grid,
                                    std::vector<SurfacePoint>* surface) {
  const std::vector<double> S_axis = log_axis(model.params.S0(), n_grid);
  const std::vector<double> V1_axis = log_axis(model.params.V10(), n_grid);
  if (surface) surface->reserve(surface->size() + S_axis.size() * V1_axis.size());
  return global_condition_E2(model, e2, S_axis, V1_axis, surface);
}

void write_surface_csv(std::ostream& os, std::span<const SurfacePoint> surface) {
  os << "S,V1,phi\n";
  for (const auto& pt : surface) {
    os << format_double(pt.S) << ',' << format_double(pt.V1) << ','
       << format_double(pt.value) << '\n';
  }
}

double global_expression_E3(const Model& model, const Equilibrium& e3,
                            const State& x) {
  if (!(x.S > 0.0 && x.V1 > 0.0 && x.I1 > 0.0 && x.I2 > 0.0))
    throw DomainError("global_expression_E3: evaluation point must be interior");
  const ModelParams& p = model.params;
  const IncidenceSpec& inc1 = model.strain1;
  const IncidenceSpec& inc2 = model.strain2;
  const State& eq = e3.point;
  const double Ss = eq.S, Vs = eq.V1;
  if (!(Ss > 0.0 && Vs > 0.0 && eq.I1 > 0.0 && eq.I2 > 0.0))
    throw DomainError("global_expression_E3: E3 must be interior");

  const double F1s = inc1.F(Ss, eq.I1);
  const double F2s = inc2.F(Ss, eq.I2);
  const double g1s = inc1.g(Ss, eq.I1);
  const double g2s = inc2.g(Ss, eq.I2);
  const double g1 = inc1.g(x.S, x.I1);
  const double g2 = inc2.g(x.S, x.I2);
  const double u = Ss / x.S;

  return F1s * (2.0 - u - x.S * g1 / (Ss * g1s)) +
         F2s * (2.0 - u - x.S * g2 / (Ss * g2s)) +
         p.r * Ss * (3.0 - u - x.V1 / Vs - x.S * Vs / (Ss * x.V1)) +
         p.mu * Ss * (2.0 - u - x.S / Ss) +
         x.I1 * (Ss * g1 - p.alpha1()) +
         x.I2 * (Ss * g2 + p.k * Vs - p.alpha2());
}

GridScanSummary global_condition_E3(const Model& model, const Equilibrium& e3,
                                    std::span<const State> points) {
  require_kind(e3, EquilibriumKind::E3, "global_condition_E3");
  require_certified(model, e3, "global_condition_E3");
  GridScanSummary summary;
  summary.max_value = -std::numeric_limits<double>::infinity();
  for (const State& x : points) {
    const double v = global_expression_E3(model, e3, x);
    ++summary.n_points;
    if (v > summary.max_value) {
      summary.max_value = v;
      summary.argmax = x;
    }
  }
  summary.nonpositive_everywhere = summary.max_value <= 0.0;
  return summary;
}

GridScanSummary global_condition_E3_lattice(const Model& model,
                                            const Equilibrium& e3, int n_grid) {
  const ModelParams& p = model.params;
  const auto S = log_axis(p.S0(), n_grid);
  const auto V = log_axis(p.V10(), n_grid);
  const auto I1 = log_axis(p.Lambda / p.alpha1(), n_grid);
  const auto I2 = log_axis(p.Lambda / p.alpha2(), n_grid);
  std::vector<State> points;
  for (const double s : S)
    for (const double v : V)
      for (const double i1 : I1)
        for (const double i2 : I2)
          if (s + v + i1 + i2 <= p.N_max()) points.push_back({s, v, i1, i2, {}});
  return global_condition_E3(model, e3, points);
}

}  // namespace twostrain
