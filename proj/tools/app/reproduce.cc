#include <cmath>
#include <complex>
#include <ostream>
#include <sstream>

#include "builtin_scenarios.h"
#include "commands.h"
#include "twostrain/format.h"

namespace twostrain::app {
namespace {

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

class Checker {
 public:
  explicit Checker(ReproductionResult& result) : result_(result) {}

  void expect(std::string name, std::string source, bool passed,
              std::string detail) {
    result_.assertions.push_back(
        {std::move(name), std::move(source), passed, std::move(detail)});
  }

  void near(std::string name, std::string source, double computed,
            double expected, double rel_tol) {
    const double rel = std::abs(computed - expected) / std::abs(expected);
    expect(std::move(name), std::move(source), rel <= rel_tol,
           "computed " + short_num(computed) + ", expected " + short_num(expected) +
               ", relative error " + short_num(rel) + " (tolerance " +
               short_num(rel_tol) + ")");
  }

  void below(std::string name, std::string source, double value, double bound) {
    expect(std::move(name), std::move(source), value <= bound,
           "value " + short_num(value) + " <= " + short_num(bound));
  }

  void above(std::string name, std::string source, double value, double bound) {
    expect(std::move(name), std::move(source), value > bound,
           "value " + short_num(value) + " > " + short_num(bound));
  }

  void verdict(const AnalysisReport& report, EquilibriumKind kind,
               Verdict expected) {
    const StabilityReport* s = report.stability_of(kind);
    const std::string name =
        std::string(kind_name(kind)) + " " + std::string(verdict_name(expected));
    if (!s) {
      expect(name, "paper", false, "equilibrium not found");
      return;
    }
    expect(name, "paper", s->verdict == expected && s->consistent(),
           "verdict " + std::string(verdict_name(s->verdict)) + ", eigensolver " +
               std::string(verdict_name(s->eigen_verdict)));
  }

  void converges(const SimulationResult& sim, EquilibriumKind kind) {
    const std::string name = "trajectory converges to " + std::string(kind_name(kind));
    if (!sim.convergence) {
      expect(name, "paper", false,
             sim.trajectory.truncated() ? "run truncated" : "no convergence detected");
      return;
    }
    expect(name, "paper", sim.convergence->target == kind,
           "converged to " + std::string(kind_name(*sim.convergence->target)) +
               " at t = " + short_num(sim.convergence->time));
  }

  void discrepancy(std::string name, std::string paper_value, double computed,
                   std::string note) {
    result_.discrepancies.push_back(
        {std::move(name), std::move(paper_value), computed, std::move(note)});
  }

 private:
  ReproductionResult& result_;
};

const GlobalCheck* find_check(const AnalysisReport& report, std::string_view prefix) {
  for (const auto& c : report.global_checks)
    if (c.name.starts_with(prefix)) return &c;
  return nullptr;
}

double coefficient(const RouthHurwitz& rh, std::string_view name) {
  for (const auto& c : rh.coefficients)
    if (c.name == name) return c.value;
  return std::nan("");
}

double condition(const RouthHurwitz& rh, std::string_view name) {
  for (const auto& c : rh.conditions)
    if (c.name == name) return c.value;
  return std::nan("");
}

void reproduce_6_1(Checker& check, const Scenario& scenario,
                   const ReproductionResult& r) {
  const Thresholds& th = r.analysis.thresholds();
  const ModelParams& p = scenario.params;
  check.near("S0", "paper", p.S0(), 1667, 5e-4);
  check.near("V10", "paper", p.V10(), 8333, 5e-4);
  check.near("R1", "paper", th.R1, 0.2632, 5e-4);
  check.near("R2", "paper", th.R2, 0.7947, 5e-4);
  const auto& eq = r.analysis.equilibria;
  check.expect("only E0 exists", "paper",
               !eq.e1 && eq.e2.roots.empty() && !eq.e3,
               "E1 " + std::string(eq.e1 ? "present" : "absent") + ", E2 roots " +
                   std::to_string(eq.e2.roots.size()) + ", E3 " +
                   (eq.e3 ? "present" : "absent"));
  check.verdict(r.analysis, EquilibriumKind::E0, Verdict::kLocallyStable);
  check.converges(r.simulation, EquilibriumKind::E0);
  const State& xf = r.simulation.trajectory.states.back();
  check.below("final I1", "paper", xf.I1, 1e-3);
  check.below("final I2", "paper", xf.I2, 1e-3);
}

void reproduce_6_2(Checker& check, const Scenario& scenario,
                   const ReproductionResult& r) {
  const Thresholds& th = r.analysis.thresholds();
  const ModelParams& p = scenario.params;
  check.near("R1", "paper", th.R1, 1.7544, 5e-4);
  check.near("R2", "paper", th.R2, 0.7947, 5e-4);
  const auto& e1 = r.analysis.equilibria.e1;
  check.expect("E1 exists", "paper", e1.has_value(), "R1 = " + short_num(th.R1));
  if (!e1) return;
  const State& x = e1->point;
  check.near("S_bar", "paper", x.S, 950, 1e-3);

  const double beta1 = scenario.incidence1.beta;
  const double I1_oracle =
      (p.Lambda - p.lambda() * p.alpha1() / beta1) / p.alpha1();
  const double V1_oracle = p.r * x.S / p.mu;
  check.near("I1_bar (closed-form balance)", "oracle", x.I1, I1_oracle, 1e-9);
  check.near("V1_bar (closed-form balance)", "oracle", x.V1, V1_oracle, 1e-9);
  check.below("E1 residual", "oracle", e1->residual, 1e-10);
  check.discrepancy("I1_bar", "253", x.I1,
                    "inconsistent with S_bar = 950 under bilinear incidence; the "
                    "strain-1 balance gives " + short_num(I1_oracle));
  check.discrepancy("V1_bar", "4737", x.V1,
                    "V1 balance r S_bar / mu gives " + short_num(V1_oracle));

  check.verdict(r.analysis, EquilibriumKind::E1, Verdict::kLocallyStable);
  check.converges(r.simulation, EquilibriumKind::E1);
  check.below("final I2", "paper", r.simulation.trajectory.states.back().I2, 1e-3);
}

void reproduce_6_3(Checker& check, const Scenario& scenario,
                   const ReproductionResult& r) {
  const Thresholds& th = r.analysis.thresholds();
  check.near("R1", "paper", th.R1, 0.2632, 5e-4);
  check.near("R2", "paper", th.R2, 1.3889, 5e-4);
  const auto& roots = r.analysis.equilibria.e2.roots;
  check.expect("E2 exists", "paper", !roots.empty(), "R2 = " + short_num(th.R2));
  if (roots.empty()) return;
  const State& x = roots.front().point;
  check.near("S_tilde", "paper", x.S, 1314, 1.5e-2);
  check.near("V1_tilde", "paper", x.V1, 4814, 1.5e-2);
  check.near("I2_tilde", "paper", x.I2, 368, 1e-2);

  const GlobalCheck* scan = find_check(r.analysis, "E2 condition");
  if (!scan) {
    check.expect("Phi scan nonpositive", "paper", false, "scan not run");
  } else {
    check.expect("Phi scan nonpositive", "paper", scan->satisfied(),
                 "max Phi " + short_num(scan->summary.max_value) + " over " +
                     std::to_string(scan->summary.n_points) + " points");
  }
  const double phi_eq = global_phi_E2(scenario.model(), roots.front(), x.S, x.V1);
  check.below("|Phi| at E2", "oracle", std::abs(phi_eq), 1e-9);
  check.verdict(r.analysis, EquilibriumKind::E0, Verdict::kUnstable);
  check.verdict(r.analysis, EquilibriumKind::E2, Verdict::kLocallyStable);
  check.converges(r.simulation, EquilibriumKind::E2);
}

void reproduce_6_4(Checker& check, const Scenario&, const ReproductionResult& r) {
  const Thresholds& th = r.analysis.thresholds();
  check.near("R1", "paper", th.R1, 7.0175, 1e-2);
  check.near("R2", "paper", th.R2, 4.1270, 1e-2);
  check.near("R2_bar", "paper", th.R2_bar.value_or(NAN), 3.555, 1e-2);
  check.near("R1_tilde", "paper", th.R1_tilde.value_or(NAN), 1.194, 1e-2);

  const auto& eq = r.analysis.equilibria;
  if (eq.e1) {
    check.near("S_bar", "paper", eq.e1->point.S, 5310, 1.5e-2);
    check.near("V1_bar", "paper", eq.e1->point.V1, 2655, 1.5e-2);
  } else {
    check.expect("E1 exists", "paper", false, "R1 = " + short_num(th.R1));
  }
  if (!eq.e2.roots.empty()) {
    check.near("S_tilde", "paper", eq.e2.roots.front().point.S, 1134, 1.5e-2);
  } else {
    check.expect("E2 exists", "paper", false, "R2 = " + short_num(th.R2));
  }
  if (!eq.e3) {
    check.expect("E3 exists", "paper", false, "no coexistence equilibrium found");
    return;
  }
  const State& x = eq.e3->point;
  check.near("S*", "paper", x.S, 1133, 1.5e-2);
  check.near("V1*", "paper", x.V1, 320, 1.5e-2);
  check.near("I1*", "paper", x.I1, 44, 1.5e-2);
  check.near("I2*", "paper", x.I2, 774, 1.5e-2);

  const StabilityReport* s3 = r.analysis.stability_of(EquilibriumKind::E3);
  if (s3 && s3->rh) {
    const RouthHurwitz& rh = *s3->rh;
    std::complex<double> e1{0}, e2{0}, e3{0}, e4{1};
    const auto& z = s3->eigenvalues;
    for (int i = 0; i < 4; ++i) {
      e1 += z[i];
      e4 *= z[i];
      for (int j = i + 1; j < 4; ++j) {
        e2 += z[i] * z[j];
        for (int k = j + 1; k < 4; ++k) e3 += z[i] * z[j] * z[k];
      }
    }
    const double c1 = coefficient(rh, "c1"), c2 = coefficient(rh, "c2");
    const double c3 = coefficient(rh, "c3"), c4 = coefficient(rh, "c4");
    check.near("c1 (spectrum sum)", "oracle", c1, -e1.real(), 1e-7);
    check.near("c2 (spectrum pair products)", "oracle", c2, e2.real(), 1e-7);
    check.near("c3 (spectrum triple products)", "oracle", c3, -e3.real(), 1e-7);
    check.near("c4 (spectrum product)", "oracle", c4, e4.real(), 1e-7);
    const double cond1 = condition(rh, "c1*c2 - c3");
    const double cond2 = condition(rh, "c1*c2*c3 - c3^2 - c1^2*c4");
    check.above("c1*c2 - c3", "oracle", cond1, 0.0);
    check.above("c1*c2*c3 - c3^2 - c1^2*c4", "oracle", cond2, 0.0);
    check.discrepancy("c1", "0.2501", c1, "differs from the published formula");
    check.discrepancy("c2", "0.0171", c2, "differs from the published formula");
    check.discrepancy("c3", "3.4759e-4", c3, "differs from the published formula");
    check.discrepancy("c4", "3.4759 x 3.9242e-6", c4, "printed as a product; the second composite condition implies 3.9242e-6");
    check.discrepancy("c1*c2 - c3", "0.0043", cond1,
                      "printed with c3^2 in place of c3");
    check.discrepancy("c1*c2*c3 - c3^2 - c1^2*c4", "1.1218e-6", cond2,
                      "reproduced from the published c1, c2, c3 with c4 = 3.9242e-6");
  } else {
    check.expect("E3 Routh-Hurwitz coefficients", "oracle", false,
                 "no Routh-Hurwitz data for E3");
  }

  check.verdict(r.analysis, EquilibriumKind::E0, Verdict::kUnstable);
  check.verdict(r.analysis, EquilibriumKind::E1, Verdict::kUnstable);
  check.verdict(r.analysis, EquilibriumKind::E2, Verdict::kUnstable);
  check.verdict(r.analysis, EquilibriumKind::E3, Verdict::kLocallyStable);

  const GlobalCheck* expr = find_check(r.analysis, "E3 Lyapunov");
  if (!expr) {
    check.expect("E3 expression along trajectory", "paper", false, "check not run");
  } else {
    check.expect("E3 expression along trajectory", "paper", expr->satisfied(),
                 "max " + short_num(expr->summary.max_value) + " <= " +
                     short_num(expr->tolerance) + " over " +
                     std::to_string(expr->summary.n_points) + " points");
  }
  check.converges(r.simulation, EquilibriumKind::E3);
  check.above("tail min I1", "paper", r.simulation.persistence.min_I1_tail, 1.0);
  check.above("tail min I2", "paper", r.simulation.persistence.min_I2_tail, 1.0);
}

}  // namespace

std::optional<ExampleId> parse_example_id(std::string_view text) {
  if (text.starts_with("example")) text.remove_prefix(7);
  if (text.starts_with("_") || text.starts_with("-")) text.remove_prefix(1);
  if (text == "6.1" || text == "6_1") return ExampleId::k6_1;
  if (text == "6.2" || text == "6_2") return ExampleId::k6_2;
  if (text == "6.3" || text == "6_3") return ExampleId::k6_3;
  if (text == "6.4" || text == "6_4") return ExampleId::k6_4;
  return std::nullopt;
}

std::string_view example_name(ExampleId id) {
  switch (id) {
    case ExampleId::k6_1: return "6.1";
    case ExampleId::k6_2: return "6.2";
    case ExampleId::k6_3: return "6.3";
    case ExampleId::k6_4: return "6.4";
  }
  return "?";
}

std::string_view builtin_scenario_text(ExampleId id) {
  switch (id) {
    case ExampleId::k6_1: return builtin::kExample6_1;
    case ExampleId::k6_2: return builtin::kExample6_2;
    case ExampleId::k6_3: return builtin::kExample6_3;
    case ExampleId::k6_4: return builtin::kExample6_4;
  }
  return {};
}

Scenario builtin_scenario(ExampleId id) {
  return parse_scenario_text(builtin_scenario_text(id),
                             "example_" + std::string(example_name(id)));
}

bool ReproductionResult::passed() const {
  for (const auto& a : assertions)
    if (!a.passed) return false;
  return !assertions.empty();
}

ReproductionResult cmd_reproduce(ExampleId id, const AnalyzeOptions& options) {
  const Scenario scenario = builtin_scenario(id);
  ReproductionResult result;
  result.id = id;
  result.analysis = cmd_analyze(scenario, options);
  result.simulation = cmd_simulate(scenario);

  Checker check(result);
  switch (id) {
    case ExampleId::k6_1: reproduce_6_1(check, scenario, result); break;
    case ExampleId::k6_2: reproduce_6_2(check, scenario, result); break;
    case ExampleId::k6_3: reproduce_6_3(check, scenario, result); break;
    case ExampleId::k6_4: reproduce_6_4(check, scenario, result); break;
  }
  return result;
}

void write_reproduction(std::ostream& os, const ReproductionResult& result) {
  os << "[reproduce " << example_name(result.id) << "]\n";
  for (const auto& a : result.assertions)
    os << (a.passed ? "PASS" : "FAIL") << " [" << a.source << "] " << a.name
       << ": " << a.detail << '\n';
  for (const auto& d : result.discrepancies)
    os << "paper_discrepancy " << d.name << ": printed " << d.paper_value
       << ", computed " << format_double(d.computed) << " (" << d.note << ")\n";
  os << "result = " << (result.passed() ? "PASS" : "FAIL") << '\n';
}

}  // namespace twostrain::app
