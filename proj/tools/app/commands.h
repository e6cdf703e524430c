#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenario.h"
#include "twostrain/equilibria.h"
#include "twostrain/simulate.h"
#include "twostrain/stability.h"

namespace twostrain::app {

/// Allowance for the E3 Lyapunov expression, which vanishes at E3 and is
/// evaluated in floating point near it.
inline constexpr double kE3ExpressionTolerance = 1e-9;

/// One numerical check of a global-stability condition.
struct GlobalCheck {
  std::string name;
  GridScanSummary summary;
  /// max_value <= tolerance counts as satisfied.
  double tolerance = 0.0;

  bool satisfied() const { return summary.max_value <= tolerance; }
};

struct AnalyzeOptions {
  /// Points per axis of the E2 global-condition scan.
  int grid = 200;
};

struct AnalysisReport {
  EquilibriumSet equilibria;
  /// One entry per element of equilibria.all(), same order.
  std::vector<StabilityReport> stability;
  std::vector<GlobalCheck> global_checks;
  /// Each line names the condition values that produced it.
  std::vector<std::string> verdicts;

  const Thresholds& thresholds() const { return equilibria.thresholds; }
  const StabilityReport* stability_of(EquilibriumKind kind) const;
};

AnalysisReport cmd_analyze(const Scenario& scenario,
                           const AnalyzeOptions& options = {});
void write_report(std::ostream& os, const AnalysisReport& report);
/// One row per equilibrium: kind, point, residual, verdicts.
void write_equilibria_csv(std::ostream& os, const AnalysisReport& report);

struct SimulationResult {
  Trajectory trajectory;
  std::vector<Equilibrium> candidates;
  std::optional<TrajectoryEvent> convergence;
  InvarianceReport invariance;
  PersistenceProxy persistence;
};

/// Integrates from the scenario's initial state and classifies the tail.
/// A run cut short by a negative excursion is returned as is; callers
/// decide whether that is fatal.
SimulationResult cmd_simulate(const Scenario& scenario);
void write_simulation_summary(std::ostream& os, const SimulationResult& result);

struct SweepRequest {
  std::string key;
  double from = 0.0;
  double to = 0.0;
  int n = 101;
  /// Skip equilibrium solves and stability classification.
  bool thresholds_only = false;
  /// 0 means one worker per hardware thread.
  unsigned workers = 0;
};

struct SweepRow {
  double value = 0.0;
  Thresholds thresholds;
  bool e1 = false;
  int e2_roots = 0;
  bool e3 = false;
  std::optional<Verdict> e0_verdict, e1_verdict, e2_verdict, e3_verdict;
  /// Non-empty when this grid point failed; the other fields are partial.
  std::string error;
};

/// Evaluates the scenario on `n` evenly spaced values of `key`. Throws
/// ConfigError for a non-numeric key or n < 2.
std::vector<SweepRow> cmd_sweep(const Scenario& scenario,
                                const SweepRequest& request);
void write_sweep_csv(std::ostream& os, std::string_view key,
                     const std::vector<SweepRow>& rows);

struct GlobalCheckResult {
  std::optional<GlobalCheck> e2_scan;
  std::vector<SurfacePoint> surface;
  std::optional<GlobalCheck> e3_trajectory;
  std::optional<GlobalCheck> e3_lattice;
  std::vector<std::string> notes;
};

/// Global-condition scans for whichever of E2 / E3 exist. `lattice` > 0
/// additionally runs the exhaustive E3 lattice with that many points per
/// coordinate.
GlobalCheckResult cmd_check_global(const Scenario& scenario, int grid,
                                   int lattice = 0);
void write_global_report(std::ostream& os, const GlobalCheckResult& result);

enum class ExampleId { k6_1, k6_2, k6_3, k6_4 };

std::optional<ExampleId> parse_example_id(std::string_view text);
std::string_view example_name(ExampleId id);
Scenario builtin_scenario(ExampleId id);
/// The built-in scenario file text.
std::string_view builtin_scenario_text(ExampleId id);

struct Assertion {
  std::string name;
  /// "paper" or "oracle".
  std::string source;
  bool passed = false;
  std::string detail;
};

/// A published number that is not asserted because it contradicts the
/// published formulas; kept for transparency.
struct PaperDiscrepancy {
  std::string name;
  std::string paper_value;
  double computed = 0.0;
  std::string note;
};

struct ReproductionResult {
  ExampleId id = ExampleId::k6_1;
  std::vector<Assertion> assertions;
  std::vector<PaperDiscrepancy> discrepancies;
  AnalysisReport analysis;
  SimulationResult simulation;

  bool passed() const;
};

ReproductionResult cmd_reproduce(ExampleId id,
                                 const AnalyzeOptions& options = {});
void write_reproduction(std::ostream& os, const ReproductionResult& result);

}  // namespace twostrain::app
