#include "twostrain/equilibria.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include <Eigen/Dense>

#include "roots.h"
#include "twostrain/errors.h"
#include "twostrain/simulate.h"

namespace twostrain {
namespace {

using detail::Bracket;

constexpr double kBracketLow = 1e-9;     // lower bracket end, times Lambda/alpha
constexpr double kBracketWidth = 1e-12;  // bisection width, times Lambda/alpha
constexpr int kPolishSteps = 3;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Equilibrium certify(const Model& model, EquilibriumKind kind, State point,
                    std::vector<ExistenceCondition> existence,
                    std::string note = {}) {
  const double res = residual_norm(model, point);
  if (!(res < kEquilibriumResidualTol)) {
    std::ostringstream msg;
    msg << kind_name(kind) << ": residual " << res << " at (" << point.S
        << ", " << point.V1 << ", " << point.I1 << ", " << point.I2
        << ") exceeds " << kEquilibriumResidualTol;
    throw SolverError(msg.str());
  }
  return {kind, point, res, std::move(existence), std::move(note)};
}

void require_in(double x, double hi, const char* op) {
  if (!(x >= 0.0 && x <= hi * (1.0 + 1e-12))) {
    std::ostringstream msg;
    msg << op << ": argument " << x << " outside [0, " << hi << "]";
    throw DomainError(msg.str());
  }
}

// Susceptible density on the manifold where dS/dt = dV1/dt = 0, given the
// infective densities.
double S_reduced(const ModelParams& p, double I1, double I2) {
  const double S = (p.Lambda - p.alpha1() * I1 - p.alpha2() * I2) *
                   (p.mu + p.k * I2) / (p.lambda() * p.mu + p.mu * p.k * I2);
  return std::max(S, 0.0);
}

double V1_reduced(const ModelParams& p, double S, double I2) {
  return p.r * S / (p.mu + p.k * I2);
}

State point_on_manifold(const ModelParams& p, double I1, double I2) {
  const double S = S_reduced(p, I1, I2);
  return {S, V1_reduced(p, S, I2), I1, I2, {}};
}

double root_in(const detail::ScalarFn& fn, Bracket b, double scale) {
  if (b.lo == b.hi) return b.lo;
  const double x = detail::bisect(fn, b, kBracketWidth * scale);
  return detail::polish_newton(fn, x, b, kPolishSteps);
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Reduced coexistence system in (I1, I2). Infeasible points (non-positive
// infectives or an empty susceptible class) yield no value.
class CoexistenceSystem {
 public:
  explicit CoexistenceSystem(const Model& model) : model_(model) {}

  std::optional<Eigen::Vector2d> operator()(const Eigen::Vector2d& z) const {
    const ModelParams& p = model_.params;
    if (!(z[0] > 0.0 && z[1] > 0.0) || !z.allFinite()) return std::nullopt;
    const double S = S_reduced(p, z[0], z[1]);
    if (!(S > 0.0)) return std::nullopt;
    const double V1 = V1_reduced(p, S, z[1]);
    return Eigen::Vector2d{
        model_.strain1.f(S, z[0]) - p.alpha1(),
        model_.strain2.f(S, z[1]) + p.k * V1 - p.alpha2()};
  }

  std::optional<Eigen::Matrix2d> jacobian(const Eigen::Vector2d& z,
                                          const Eigen::Vector2d& Gz) const {
    Eigen::Matrix2d J;
    for (int i = 0; i < 2; ++i) {
      const double h =
          std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(z[i]));
      Eigen::Vector2d up = z, down = z;
      up[i] += h;
      down[i] -= h;
      const auto G_up = (*this)(up);
      if (!G_up) return std::nullopt;
      if (const auto G_down = (*this)(down)) {
        J.col(i) = (*G_up - *G_down) / (2.0 * h);
      } else {
        J.col(i) = (*G_up - Gz) / h;
      }
    }
    return J;
  }

  /// Damped Newton. Returns the converged (I1, I2) or nothing.
  std::optional<Eigen::Vector2d> newton(Eigen::Vector2d z,
                                        std::string& diagnostic) const {
    auto G = (*this)(z);
    if (!G) {
      diagnostic = "infeasible start";
      return std::nullopt;
    }
    const double G_floor = 1e-15 * (model_.params.alpha1() + model_.params.alpha2());
    for (int it = 0; it < 100; ++it) {
      const double norm = G->lpNorm<Eigen::Infinity>();
      if (norm <= G_floor) return z;
      const auto J = jacobian(z, *G);
      if (!J || std::abs(J->determinant()) == 0.0 || !J->allFinite()) {
        diagnostic = "singular Jacobian at iteration " + std::to_string(it);
        return std::nullopt;
      }
      const Eigen::Vector2d step = J->partialPivLu().solve(-*G);
      double t = 1.0;
      bool accepted = false;
      for (int halving = 0; halving < 50; ++halving, t *= 0.5) {
        const Eigen::Vector2d trial = z + t * step;
        const auto G_trial = (*this)(trial);
        if (G_trial && G_trial->lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * t) * norm) {
          z = trial;
          G = G_trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // Stagnation at roundoff level counts as convergence; certification
        // by residual happens afterwards.
        if (norm <= 1e-12 * (model_.params.alpha1() + model_.params.alpha2())) return z;
        diagnostic = "line search failed at |G| = " + format_number(norm);
        return std::nullopt;
      }
      if ((t * step).lpNorm<Eigen::Infinity>() <=
          4.0 * std::numeric_limits<double>::epsilon() * z.lpNorm<Eigen::Infinity>())
        return z;
    }
    diagnostic = "no convergence in 100 iterations";
    return std::nullopt;
  }

  /// Candidate roots by nested bracketing. For fixed I2 the first equation
  /// decreases in I1, so it defines I1(I2) by bisection; sign changes of the
  /// second equation along that curve bracket the coexistence states.
  std::vector<Eigen::Vector2d> bracket_candidates(int n_scan) const {
    const ModelParams& p = model_.params;
    const double I2_max = p.Lambda / p.alpha2();

    auto I1_of = [&](double I2) -> std::optional<double> {
      const double I1_max = (p.Lambda - p.alpha2() * I2) / p.alpha1();
      if (!(I1_max > 0.0)) return std::nullopt;
      auto G1 = [&](double I1) {
        return model_.strain1.f(S_reduced(p, I1, I2), I1) - p.alpha1();
      };
      if (!(G1(0.0) > 0.0)) return std::nullopt;
      return detail::bisect(G1, {0.0, I1_max}, kBracketWidth * I1_max);
    };
    auto phi = [&](double I2) -> std::optional<double> {
      const auto I1 = I1_of(I2);
      if (!I1 || !(*I1 > 0.0)) return std::nullopt;
      const double S = S_reduced(p, *I1, I2);
      return model_.strain2.f(S, I2) + p.k * V1_reduced(p, S, I2) - p.alpha2();
    };

    std::vector<Eigen::Vector2d> out;
    double x_prev = 0.0;
    std::optional<double> v_prev;
    for (int i = 1; i < n_scan; ++i) {
      const double x = I2_max * i / n_scan;
      const auto v = phi(x);
      if (v && v_prev && ((*v > 0.0) != (*v_prev > 0.0))) {
        // phi is defined at both ends; bisect on the sub-bracket.
        double lo = x_prev, hi = x;
        double f_lo = *v_prev;
        for (int it = 0; it < 200 && hi - lo > kBracketWidth * I2_max; ++it) {
          const double mid = 0.5 * (lo + hi);
          const auto f_mid = phi(mid);
          if (!f_mid) break;
          if ((*f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = *f_mid;
          } else {
            hi = mid;
          }
        }
        const double I2 = 0.5 * (lo + hi);
        if (const auto I1 = I1_of(I2)) out.emplace_back(*I1, I2);
      }
      x_prev = x;
      v_prev = v;
    }
    return out;
  }

 private:
  const Model& model_;
};

std::optional<Eigen::Vector2d> simulated_start(const Model& model) {
  const ModelParams& p = model.params;
  const State x0{0.5 * p.S0(), 0.5 * p.V10(), 0.1 * p.Lambda / p.alpha1(),
                 0.1 * p.Lambda / p.alpha2(), {}};
  IntegratorOptions opts;
  opts.rtol = 1e-6;
  opts.atol = 1e-8;
  opts.t_end = 2000.0;
  opts.sample_times = {opts.t_end};
  try {
    const Trajectory traj = integrate(model, x0, opts);
    if (traj.empty() || traj.truncated()) return std::nullopt;
    const State& tail = traj.states.back();
    if (tail.I1 > 0.0 && tail.I2 > 0.0) return Eigen::Vector2d{tail.I1, tail.I2};
  } catch (const Error&) {
    // The other starts still apply.
  }
  return std::nullopt;
}

}  // namespace

Equilibrium disease_free(const Model& model) {
  const ModelParams& p = model.params;
  return certify(model, EquilibriumKind::E0, {p.S0(), p.V10(), 0.0, 0.0, {}},
                 {});
}

double G_of_I1(const Model& model, double I1) {
  const ModelParams& p = model.params;
  require_in(I1, p.Lambda / p.alpha1(), "G_of_I1");
  const double S = std::max((p.Lambda - p.alpha1() * I1) / p.lambda(), 0.0);
  return model.strain1.F(S, I1) - p.alpha1() * I1;
}

std::optional<Equilibrium> solve_E1(const Model& model) {
  const ModelParams& p = model.params;
  const Thresholds th = thresholds(model);
  if (!(th.R1 > 1.0)) return std::nullopt;

  const double scale = p.Lambda / p.alpha1();
  const Bracket b{kBracketLow * scale, scale};
  auto G = [&](double I1) { return G_of_I1(model, I1); };
  if (!(G(b.lo) > 0.0) || !(G(b.hi) < 0.0)) {
    std::ostringstream msg;
    msg << "solve_E1: G not bracketed on [" << b.lo << ", " << b.hi
        << "] although R1 = " << th.R1 << " > 1 (G(lo) = " << G(b.lo)
        << ", G(hi) = " << G(b.hi) << ")";
    throw SolverError(msg.str());
  }
  const double I1 = root_in(G, b, scale);
  const double S = (p.Lambda - p.alpha1() * I1) / p.lambda();
  return certify(model, EquilibriumKind::E1, {S, p.r * S / p.mu, I1, 0.0, {}},
                 {{"R1 > 1", th.R1, 1.0, true}});
}

double H_of_I2(const Model& model, double I2) {
  const ModelParams& p = model.params;
  require_in(I2, p.Lambda / p.alpha2(), "H_of_I2");
  const double S = S_reduced(p, 0.0, I2);
  return model.strain2.F(S, I2) + p.k * I2 * V1_reduced(p, S, I2) -
         p.alpha2() * I2;
}

E2Solution solve_E2(const Model& model, int n_scan) {
  if (n_scan < 1) throw DomainError("solve_E2: n_scan must be >= 1");
  const ModelParams& p = model.params;
  const Thresholds th = thresholds(model);
  const double scale = p.Lambda / p.alpha2();

  E2Solution out;
  out.discriminant = -p.alpha2() * p.r * p.mu - p.alpha2() * p.mu * p.mu +
                     p.k * p.Lambda * p.r;
  if (out.discriminant > 0.0) {
    const double a2 = p.alpha2();
    const double lo =
        (-p.r * a2 - a2 * p.mu +
         std::sqrt(p.r * a2 * (p.r * a2 + a2 * p.mu + p.k * p.Lambda))) /
        (a2 * p.k);
    out.uniqueness_interval = std::pair{lo, scale};
  }

  {
    constexpr int kLattice = 32;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kLattice; ++i) {
      for (int j = 0; j < kLattice; ++j) {
        const double S = p.S0() * i / (kLattice - 1);
        const double I2 = scale * j / (kLattice - 1);
        worst = std::max(worst, model.strain2.dF_dS(S, I2) - I2);
      }
    }
    out.slope_bound = {"max(dF2/dS - I2) <= 0 on [0,S0]x[0,Lambda/alpha2]",
                       worst, 0.0, worst <= 0.0};
  }

  if (!(th.R2 > 1.0)) return out;

  auto H = [&](double I2) { return H_of_I2(model, I2); };
  const auto brackets =
      detail::scan_sign_changes(H, kBracketLow * scale, scale, n_scan);
  if (brackets.empty()) {
    std::ostringstream msg;
    msg << "solve_E2: no sign change of H at resolution " << n_scan
        << " although R2 = " << th.R2 << " > 1";
    throw SolverError(msg.str());
  }

  const ExistenceCondition r2_condition{"R2 > 1", th.R2, 1.0, true};
  const ExistenceCondition d_condition{"d <= 0 (unique root)",
                                       out.discriminant, 0.0,
                                       out.discriminant <= 0.0};
  const std::size_t n_roots = brackets.size();
  for (std::size_t i = 0; i < n_roots; ++i) {
    const double I2 = root_in(H, brackets[i], scale);
    const State point = point_on_manifold(p, 0.0, I2);

    std::string note;
    if (out.uniqueness_interval) {
      const auto [lo, hi] = *out.uniqueness_interval;
      note = "d = " + format_number(out.discriminant) +
             " > 0: at most one root in [" + format_number(lo) + ", " +
             format_number(hi) + "]; this root lies " +
             ((I2 >= lo && I2 <= hi) ? "inside" : "outside") + " it";
    } else {
      note = "d = " + format_number(out.discriminant) + " <= 0: unique root expected";
    }
    if (n_roots > 1) {
      note += "; root " + std::to_string(i + 1) + " of " +
              std::to_string(n_roots) + " found at scan resolution " +
              std::to_string(n_scan);
    }
    out.roots.push_back(certify(model, EquilibriumKind::E2, point,
                                {r2_condition, d_condition, out.slope_bound},
                                std::move(note)));
  }
  return out;
}

std::optional<Equilibrium> solve_E3(const Model& model,
                                    const std::optional<State>& hint) {
  return solve_E3(model, solve_E1(model), solve_E2(model), hint);
}

std::optional<Equilibrium> solve_E3(const Model& model,
                                    const std::optional<Equilibrium>& e1,
                                    const E2Solution& e2,
                                    const std::optional<State>& hint) {
  const ModelParams& p = model.params;
  const std::optional<Equilibrium> e2_first =
      e2.roots.empty() ? std::nullopt : std::optional{e2.roots.front()};
  const auto [R2_bar, R1_tilde] = invaded_thresholds(model, e1, e2_first);
  const bool guaranteed = R2_bar && R1_tilde && *R2_bar > 1.0 && *R1_tilde > 1.0;
  const std::vector<ExistenceCondition> existence{
      {e1 ? "R2_bar > 1" : "R2_bar > 1 (E1 absent)", R2_bar.value_or(kNaN), 1.0,
       R2_bar && *R2_bar > 1.0},
      {e2_first ? "R1_tilde > 1" : "R1_tilde > 1 (E2 absent)",
       R1_tilde.value_or(kNaN), 1.0, R1_tilde && *R1_tilde > 1.0}};

  const CoexistenceSystem system(model);
  std::vector<std::string> tried;

  auto attempt = [&](const char* label,
                     const Eigen::Vector2d& z0) -> std::optional<Equilibrium> {
    std::string diagnostic;
    const auto z = system.newton(z0, diagnostic);
    if (z) {
      const State point = point_on_manifold(p, (*z)[0], (*z)[1]);
      const double res = residual_norm(model, point);
      if (res < kEquilibriumResidualTol)
        return certify(model, EquilibriumKind::E3, point, existence);
      diagnostic = "converged with residual " + format_number(res);
    }
    tried.push_back(std::string(label) + " (" + format_number(z0[0]) + ", " +
                    format_number(z0[1]) + "): " + diagnostic);
    return std::nullopt;
  };

  if (hint) {
    if (auto e3 = attempt("hint", {hint->I1, hint->I2})) return e3;
  }
  if (e1) {
    for (const auto& root : e2.roots) {
      if (auto e3 = attempt("single-strain", {e1->point.I1, root.point.I2}))
        return e3;
    }
  }
  if (const auto z0 = simulated_start(model)) {
    if (auto e3 = attempt("simulation tail", *z0)) return e3;
  }
  for (const auto& z0 : system.bracket_candidates(512)) {
    if (auto e3 = attempt("bracketing", z0)) return e3;
  }

  if (!guaranteed) return std::nullopt;

  std::ostringstream msg;
  msg << "solve_E3: no coexistence state found although R2_bar = " << *R2_bar
      << " > 1 and R1_tilde = " << *R1_tilde << " > 1; starts tried:";
  for (const auto& t : tried) msg << "\n  " << t;
  throw SolverError(msg.str());
}

std::vector<Equilibrium> EquilibriumSet::all() const {
  std::vector<Equilibrium> out{e0};
  if (e1) out.push_back(*e1);
  out.insert(out.end(), e2.roots.begin(), e2.roots.end());
  if (e3) out.push_back(*e3);
  return out;
}

EquilibriumSet solve_all(const Model& model,
                         const std::optional<State>& e3_hint) {
  EquilibriumSet set;
  set.thresholds = thresholds(model);
  set.e0 = disease_free(model);
  set.e1 = solve_E1(model);
  set.e2 = solve_E2(model);
  const std::optional<Equilibrium> e2_first =
      set.e2.roots.empty() ? std::nullopt : std::optional{set.e2.roots.front()};
  std::tie(set.thresholds.R2_bar, set.thresholds.R1_tilde) =
      invaded_thresholds(model, set.e1, e2_first);
  set.e3 = solve_E3(model, set.e1, set.e2, e3_hint);
  return set;
}

}  // namespace twostrain
