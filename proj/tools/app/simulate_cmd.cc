#include <ostream>

#include "commands.h"
#include "twostrain/format.h"

namespace twostrain::app {

SimulationResult cmd_simulate(const Scenario& scenario) {
  validate(scenario);
  const Model model = scenario.model();

  SimulationResult result;
  result.candidates = solve_all(model).all();
  result.trajectory = integrate(model, scenario.x0, scenario.integrator);
  result.invariance = monitor_invariance(result.trajectory, model.params);
  result.persistence = persistence_proxy(result.trajectory, 0.5);
  if (!result.trajectory.truncated()) {
    result.convergence = detect_convergence(model, result.trajectory,
                                            result.candidates, scenario.integrator);
    if (result.convergence) result.trajectory.events.push_back(*result.convergence);
  }
  return result;
}

void write_simulation_summary(std::ostream& os, const SimulationResult& result) {
  const Trajectory& traj = result.trajectory;
  os << "[simulation]\n"
     << "samples = " << traj.size() << '\n'
     << "accepted_steps = " << traj.accepted_steps << '\n'
     << "rejected_steps = " << traj.rejected_steps << '\n'
     << "t_final = " << format_double(traj.times.back()) << '\n';
  const State& xf = traj.states.back();
  os << "final_state = " << format_double(xf.S) << ", " << format_double(xf.V1)
     << ", " << format_double(xf.I1) << ", " << format_double(xf.I2) << '\n'
     << "truncated = " << (traj.truncated() ? "true" : "false") << "\n\n";

  os << "[events]\n";
  for (const auto& ev : traj.events) {
    os << "- t = " << format_double(ev.time) << ' ' << event_name(ev.kind);
    if (ev.target) os << ' ' << kind_name(*ev.target);
    if (!ev.detail.empty()) os << " (" << ev.detail << ')';
    os << '\n';
  }
  if (!result.convergence && !traj.truncated())
    os << "- no convergence detected within the tail window\n";
  os << '\n';

  const InvarianceReport& inv = result.invariance;
  os << "[invariance]\n"
     << "omega_ok = " << (inv.omega_ok ? "true" : "false") << '\n'
     << "omega1_ok = " << (inv.omega1_ok ? "true" : "false") << '\n'
     << "final_bound_ok = " << (inv.final_bound_ok ? "true" : "false") << '\n'
     << "final_N = " << format_double(inv.final_N) << '\n'
     << "violations = " << inv.violations << '\n';
  if (inv.first_violation)
    os << "first_violation = t " << format_double(inv.first_violation->time)
       << ": " << inv.first_violation->what << '\n';
  os << '\n';

  os << "[persistence]\n"
     << "min_I1_tail = " << format_double(result.persistence.min_I1_tail) << '\n'
     << "min_I2_tail = " << format_double(result.persistence.min_I2_tail) << '\n';
}

}  // namespace twostrain::app
