#include <cmath>
#include <ostream>
#include <sstream>

#include "commands.h"
#include "twostrain/format.h"

namespace twostrain::app {
namespace {

std::string num(double v) { return format_double(v); }

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string complex_text(const std::complex<double>& z) {
  return num(z.real()) + (std::signbit(z.imag()) ? "-" : "+") +
         num(std::abs(z.imag())) + "i";
}

std::string state_text(const State& x) {
  return num(x.S) + ", " + num(x.V1) + ", " + num(x.I1) + ", " + num(x.I2);
}

bool interior(const State& x) {
  return x.S > 0.0 && x.V1 > 0.0 && x.I1 > 0.0 && x.I2 > 0.0;
}

GlobalCheck e3_trajectory_check(const Model& model, const Scenario& scenario,
                                const Equilibrium& e3) {
  const ModelParams& p = model.params;
  State x0 = scenario.x0;
  x0.R.reset();
  std::string origin = "scenario initial state";
  if (!interior(x0)) {
    x0 = {0.5 * p.S0(), 0.5 * p.V10(), 0.1 * p.Lambda / p.alpha1(),
          0.1 * p.Lambda / p.alpha2(), {}};
    origin = "interior start (S0/2, V10/2, 0.1 Lambda/alpha1, 0.1 Lambda/alpha2)";
  }
  const Trajectory traj = integrate(model, x0, scenario.integrator);
  std::vector<State> points;
  points.reserve(traj.size());
  for (const State& x : traj.states)
    if (interior(x)) points.push_back(x);
  GlobalCheck check;
  check.name = "E3 Lyapunov expression along trajectory from " + origin;
  check.summary = global_condition_E3(model, e3, points);
  check.tolerance = kE3ExpressionTolerance;
  return check;
}

GlobalCheck e2_scan(const Model& model, const Equilibrium& e2, int grid,
                    std::vector<SurfacePoint>* surface) {
  GlobalCheck check;
  check.name = "E2 condition Phi(S, V1) over " + std::to_string(grid) + "x" +
               std::to_string(grid) + " log grid of Omega1";
  check.summary = global_condition_E2(model, e2, grid, surface);
  check.tolerance = 0.0;
  return check;
}

std::string verdict_line(const StabilityReport& s) {
  std::string line = std::string(kind_name(s.kind)) + ": " +
                     std::string(verdict_name(s.verdict)) + " locally (" +
                     s.basis + "); eigensolver " +
                     std::string(verdict_name(s.eigen_verdict));
  if (!s.consistent()) line += " [DISAGREES]";
  return line;
}

void write_summary(std::ostream& os, const GridScanSummary& s) {
  os << "max_value = " << num(s.max_value) << '\n'
     << "argmax = " << state_text(s.argmax) << '\n'
     << "n_points = " << s.n_points << '\n'
     << "nonpositive_everywhere = " << (s.nonpositive_everywhere ? "true" : "false")
     << '\n';
}

void write_check(std::ostream& os, const GlobalCheck& check) {
  os << "[global]\n"
     << "name = " << check.name << '\n';
  write_summary(os, check.summary);
  os << "tolerance = " << num(check.tolerance) << '\n'
     << "satisfied = " << (check.satisfied() ? "true" : "false") << "\n\n";
}

}  // namespace

const StabilityReport* AnalysisReport::stability_of(EquilibriumKind kind) const {
  for (const auto& s : stability)
    if (s.kind == kind) return &s;
  return nullptr;
}

AnalysisReport cmd_analyze(const Scenario& scenario,
                           const AnalyzeOptions& options) {
  validate(scenario);
  const Model model = scenario.model();

  AnalysisReport report;
  report.equilibria = solve_all(model);
  const auto all = report.equilibria.all();
  for (const auto& e : all) report.stability.push_back(classify(model, e));

  const Thresholds& th = report.equilibria.thresholds;
  auto& verdicts = report.verdicts;

  if (th.R0 < 1.0) {
    verdicts.push_back("E0 globally asymptotically stable (R0 = " +
                       short_num(th.R0) + " < 1)");
  } else if (th.R0 > 1.0) {
    verdicts.push_back("E0 unstable (R0 = " + short_num(th.R0) + " > 1)");
  }

  if (report.equilibria.e1) {
    verdicts.push_back("E1 exists (R1 = " + short_num(th.R1) + " > 1)");
    if (th.R2 < 1.0)
      verdicts.push_back("E1 globally asymptotically stable (R2 = " +
                         short_num(th.R2) + " < 1)");
  } else {
    verdicts.push_back("E1 absent (R1 = " + short_num(th.R1) + " <= 1)");
  }

  const auto& e2_roots = report.equilibria.e2.roots;
  if (e2_roots.empty()) {
    verdicts.push_back("E2 absent (R2 = " + short_num(th.R2) + " <= 1)");
  } else {
    verdicts.push_back("E2 exists (R2 = " + short_num(th.R2) + " > 1, " +
                       std::to_string(e2_roots.size()) + " root(s))");
    if (th.R1 < 1.0) {
      GlobalCheck check = e2_scan(model, e2_roots.front(), options.grid, nullptr);
      if (check.satisfied()) {
        verdicts.push_back("E2 globally asymptotically stable (R1 = " +
                           short_num(th.R1) + " < 1, max Phi = " +
                           short_num(check.summary.max_value) + " <= 0 on " +
                           std::to_string(check.summary.n_points) + " points)");
      } else {
        verdicts.push_back("E2 global condition not verified (max Phi = " +
                           short_num(check.summary.max_value) + " > 0 at S = " +
                           short_num(check.summary.argmax.S) + ", V1 = " +
                           short_num(check.summary.argmax.V1) + ")");
      }
      report.global_checks.push_back(std::move(check));
    }
  }

  if (const auto& e3 = report.equilibria.e3) {
    verdicts.push_back("E3 exists (R2_bar = " + short_num(th.R2_bar.value_or(NAN)) +
                       ", R1_tilde = " + short_num(th.R1_tilde.value_or(NAN)) + ")");
    const StabilityReport* s3 = report.stability_of(EquilibriumKind::E3);
    if (s3 && s3->verdict == Verdict::kLocallyStable) {
      GlobalCheck check = e3_trajectory_check(model, scenario, *e3);
      if (check.satisfied()) {
        verdicts.push_back("E3 globally asymptotically stable along the checked "
                           "trajectory (max expression = " +
                           short_num(check.summary.max_value) + " <= " +
                           short_num(check.tolerance) + " over " +
                           std::to_string(check.summary.n_points) + " points)");
      } else {
        verdicts.push_back("E3 global condition violated (max expression = " +
                           short_num(check.summary.max_value) + ")");
      }
      report.global_checks.push_back(std::move(check));
    }
  } else {
    verdicts.push_back("E3 not found (R2_bar = " +
                       (th.R2_bar ? short_num(*th.R2_bar) : std::string("n/a")) +
                       ", R1_tilde = " +
                       (th.R1_tilde ? short_num(*th.R1_tilde) : std::string("n/a")) +
                       ")");
  }

  for (const auto& s : report.stability) verdicts.push_back(verdict_line(s));
  return report;
}

void write_report(std::ostream& os, const AnalysisReport& report) {
  const Thresholds& th = report.thresholds();
  os << "[thresholds]\n"
     << "sigma1 = " << num(th.sigma1) << '\n'
     << "sigma2 = " << num(th.sigma2) << '\n'
     << "R1 = " << num(th.R1) << '\n'
     << "R2 = " << num(th.R2) << '\n'
     << "R0 = " << num(th.R0) << '\n'
     << "R2_bar = " << (th.R2_bar ? num(*th.R2_bar) : "n/a") << '\n'
     << "R1_tilde = " << (th.R1_tilde ? num(*th.R1_tilde) : "n/a") << "\n\n";

  const auto& e2 = report.equilibria.e2;
  os << "[E2 uniqueness]\n"
     << "discriminant = " << num(e2.discriminant) << '\n';
  if (e2.uniqueness_interval)
    os << "uniqueness_interval = [" << num(e2.uniqueness_interval->first) << ", "
       << num(e2.uniqueness_interval->second) << "]\n";
  os << "slope_bound = " << e2.slope_bound.name << ": "
     << num(e2.slope_bound.value) << " ("
     << (e2.slope_bound.satisfied ? "holds" : "fails") << ")\n\n";

  const auto all = report.equilibria.all();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Equilibrium& e = all[i];
    os << "[equilibrium " << kind_name(e.kind) << "]\n"
       << "point = " << state_text(e.point) << '\n'
       << "residual = " << num(e.residual) << '\n';
    for (const auto& c : e.existence) {
      os << "existence = " << c.name << ": value " << num(c.value)
         << ", threshold " << num(c.threshold) << ", "
         << (c.satisfied ? "satisfied" : "not satisfied") << '\n';
    }
    if (!e.multiplicity_note.empty()) os << "note = " << e.multiplicity_note << '\n';

    const StabilityReport& s = report.stability[i];
    os << "eigenvalues =";
    for (const auto& z : s.eigenvalues) os << ' ' << complex_text(z);
    os << '\n';
    if (s.closed_form) {
      os << "closed_form_eigenvalues =";
      for (const auto& z : *s.closed_form) os << ' ' << complex_text(z);
      os << '\n';
    }
    if (s.rh) {
      for (const auto& c : s.rh->coefficients)
        os << "coefficient " << c.name << " = " << num(c.value) << '\n';
      for (const auto& c : s.rh->conditions)
        os << "condition " << c.name << " = " << num(c.value) << " ("
           << (c.holds ? "> 0" : "<= 0") << ")\n";
      if (s.rh->decoupled_eigenvalue)
        os << "decoupled_eigenvalue " << s.rh->decoupled_eigenvalue->name << " = "
           << num(s.rh->decoupled_eigenvalue->value) << '\n';
    }
    os << "verdict = " << verdict_name(s.verdict) << '\n'
       << "eigensolver_verdict = " << verdict_name(s.eigen_verdict) << '\n'
       << "basis = " << s.basis << "\n\n";
  }

  for (const auto& check : report.global_checks) write_check(os, check);

  os << "[verdicts]\n";
  for (const auto& line : report.verdicts) os << "- " << line << '\n';
}

void write_equilibria_csv(std::ostream& os, const AnalysisReport& report) {
  os << "kind,S,V1,I1,I2,residual,verdict,eigensolver_verdict\n";
  const auto all = report.equilibria.all();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Equilibrium& e = all[i];
    os << kind_name(e.kind) << ',' << num(e.point.S) << ',' << num(e.point.V1)
       << ',' << num(e.point.I1) << ',' << num(e.point.I2) << ','
       << num(e.residual) << ',' << verdict_name(report.stability[i].verdict)
       << ',' << verdict_name(report.stability[i].eigen_verdict) << '\n';
  }
}

GlobalCheckResult cmd_check_global(const Scenario& scenario, int grid,
                                   int lattice) {
  validate(scenario);
  if (grid < 2) throw ConfigError({"--grid: must be >= 2"});
  if (lattice < 0) throw ConfigError({"--lattice: must be >= 0"});
  const Model model = scenario.model();
  const EquilibriumSet set = solve_all(model);

  GlobalCheckResult result;
  if (set.e2.roots.empty()) {
    result.notes.push_back("E2 absent (R2 = " + short_num(set.thresholds.R2) +
                           "); no Phi scan");
  } else {
    result.e2_scan = e2_scan(model, set.e2.roots.front(), grid, &result.surface);
    if (!(set.thresholds.R1 < 1.0))
      result.notes.push_back("R1 = " + short_num(set.thresholds.R1) +
                             " >= 1: the E2 global theorem does not apply");
  }
  if (!set.e3) {
    result.notes.push_back("E3 not found; no E3 expression check");
  } else {
    result.e3_trajectory = e3_trajectory_check(model, scenario, *set.e3);
    if (lattice > 0) {
      GlobalCheck check;
      check.name = "E3 Lyapunov expression over " + std::to_string(lattice) +
                   "^4 log lattice of Omega";
      check.summary = global_condition_E3_lattice(model, *set.e3, lattice);
      check.tolerance = kE3ExpressionTolerance;
      result.e3_lattice = std::move(check);
    }
  }
  return result;
}

void write_global_report(std::ostream& os, const GlobalCheckResult& result) {
  for (const auto* check : {&result.e2_scan, &result.e3_trajectory, &result.e3_lattice})
    if (*check) write_check(os, **check);
  for (const auto& note : result.notes) os << "note = " << note << '\n';
}

}  // namespace twostrain::app
