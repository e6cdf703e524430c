#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twostrain/equilibrium.h"
#include "twostrain/errors.h"
#include "twostrain/model.h"

namespace twostrain {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 1.0;
  double t_end = 5000.0;
  /// Spacing of the dense-output samples 0, dt, 2 dt, ..., t_end. Ignored
  /// when `sample_times` is non-empty.
  double sample_interval = 1.0;
  /// Explicit output times in [0, t_end], strictly increasing.
  std::vector<double> sample_times;
  /// Bound on the max-norm of the vector field for convergence detection.
  double convergence_tol = 1e-6;
  /// Length of the trailing window inspected by detect_convergence.
  double tail_window = 500.0;
  long max_steps = 10'000'000;

  /// Throws DomainError unless rtol, atol, t_end, max_step > 0 and the
  /// sampling request is well formed.
  void validate() const;
};

enum class EventKind { kEnteredOmega1, kConvergedTo, kToleranceFailure };

std::string_view event_name(EventKind kind);

struct TrajectoryEvent {
  double time = 0.0;
  EventKind kind = EventKind::kEnteredOmega1;
  /// Set for kConvergedTo.
  std::optional<EquilibriumKind> target;
  std::string detail;
};

/// Dense-output samples of one integration. A kToleranceFailure event marks
/// a run that was cut short; samples up to that point remain valid.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<TrajectoryEvent> events;
  long accepted_steps = 0;
  long rejected_steps = 0;

  bool empty() const { return times.empty(); }
  std::size_t size() const { return times.size(); }
  bool truncated() const;
  const TrajectoryEvent* find(EventKind kind) const;
};

/// Step-size underflow or step budget exhausted.
class IntegrationError : public SolverError {
 public:
  IntegrationError(const std::string& what, double t, State last_good)
      : SolverError(what), t_(t), last_good_(std::move(last_good)) {}
  double time() const { return t_; }
  const State& last_good() const { return last_good_; }

 private:
  double t_;
  State last_good_;
};

/// Dormand-Prince 5(4) with PI step-size control and dense output. The R
/// compartment is integrated iff `x0.R` is set. Components that dip into
/// (-atol, 0) are clamped to 0; anything below -atol stops the run with a
/// kToleranceFailure event.
Trajectory integrate(const Model& model, const State& x0,
                     const IntegratorOptions& opts);

struct InvarianceViolation {
  double time = 0.0;
  std::string what;
};

struct InvarianceReport {
  /// Once N <= Lambda/mu it stays below Lambda/mu (1 + 1e-6).
  bool omega_ok = true;
  /// Final N <= Lambda/mu (1 + 1e-3).
  bool final_bound_ok = true;
  /// Once S <= S0 and V1 <= V10 both stay below (1 + 1e-6) of those bounds.
  bool omega1_ok = true;
  double final_N = 0.0;
  int violations = 0;
  std::optional<InvarianceViolation> first_violation;

  bool ok() const { return omega_ok && final_bound_ok && omega1_ok; }
};

/// Throws PreconditionError on an empty trajectory.
InvarianceReport monitor_invariance(const Trajectory& traj,
                                    const ModelParams& params);

/// Nearest candidate when, at every sample of the trailing `tail_window`,
/// the vector field max-norm is below `convergence_tol` and the relative
/// max-norm distance to that candidate is below 1e-3.
std::optional<TrajectoryEvent> detect_convergence(
    const Model& model, const Trajectory& traj,
    std::span<const Equilibrium> candidates, const IntegratorOptions& opts);

/// Relative max-norm distance between `x` and `target`.
double relative_distance(const State& x, const State& target);

struct PersistenceProxy {
  double min_I1_tail = 0.0;
  double min_I2_tail = 0.0;
};

/// Minimum infective densities after discarding the first
/// `burn_in_fraction` of the time span. Throws PreconditionError unless
/// 0 <= burn_in_fraction <= 0.5 and the trajectory is non-empty.
PersistenceProxy persistence_proxy(const Trajectory& traj,
                                   double burn_in_fraction);

/// Header `t,S,V1,I1,I2[,R]` then one row per sample, shortest round-trip
/// decimal. The R column appears when the first state carries R.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace twostrain
