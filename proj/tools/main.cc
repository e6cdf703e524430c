#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.h"
#include "scenario.h"

namespace {

namespace fs = std::filesystem;
using namespace twostrain;
using namespace twostrain::app;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitReproduction = 4;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string scenario;
  std::string out;
  std::string format = "report";
  int grid = 200;
  std::optional<double> t_end;
};

void add_common(CLI::App& cmd, CommonOptions& opts, bool with_scenario) {
  if (with_scenario)
    cmd.add_option("--scenario", opts.scenario, "Scenario file")->required();
  cmd.add_option("--out", opts.out, "Directory for output files");
  cmd.add_option("--format", opts.format, "Standard output format")
      ->check(CLI::IsMember({"csv", "report"}));
  cmd.add_option("--grid", opts.grid, "Points per axis of global-condition scans");
  cmd.add_option("--t-end", opts.t_end, "Override the integration end time");
}

Scenario load(const CommonOptions& opts) {
  Scenario scenario = load_scenario(opts.scenario);
  if (opts.t_end) scenario.integrator.t_end = *opts.t_end;
  validate(scenario);
  return scenario;
}

bool csv(const CommonOptions& opts) { return opts.format == "csv"; }

void write_output(const CommonOptions& opts, const std::string& name,
                  const std::function<void(std::ostream&)>& writer) {
  if (opts.out.empty()) return;
  const fs::path dir(opts.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::ofstream file(dir / name);
  if (!file) throw IoError("cannot open " + (dir / name).string());
  writer(file);
  if (!file) throw IoError("write failed: " + (dir / name).string());
}

int run_analyze(const CommonOptions& opts) {
  const Scenario scenario = load(opts);
  const AnalysisReport report = cmd_analyze(scenario, {opts.grid});
  if (scenario.outputs.report)
    write_output(opts, "report.txt", [&](std::ostream& os) { write_report(os, report); });
  if (scenario.outputs.surface) {
    const GlobalCheckResult global = cmd_check_global(scenario, opts.grid);
    if (!global.surface.empty())
      write_output(opts, "surface.csv",
                   [&](std::ostream& os) { write_surface_csv(os, global.surface); });
  }
  if (csv(opts))
    write_equilibria_csv(std::cout, report);
  else
    write_report(std::cout, report);
  return kExitOk;
}

int run_simulate(const CommonOptions& opts) {
  const Scenario scenario = load(opts);
  const SimulationResult result = cmd_simulate(scenario);
  if (scenario.outputs.timeseries)
    write_output(opts, "timeseries.csv",
                 [&](std::ostream& os) { write_trajectory_csv(os, result.trajectory); });
  if (scenario.outputs.report)
    write_output(opts, "report.txt",
                 [&](std::ostream& os) { write_simulation_summary(os, result); });
  if (csv(opts))
    write_trajectory_csv(std::cout, result.trajectory);
  else
    write_simulation_summary(std::cout, result);
  if (result.trajectory.truncated()) {
    std::cerr << "error: integration stopped by a negative excursion\n";
    return kExitSolver;
  }
  return kExitOk;
}

int run_sweep(const CommonOptions& opts, const SweepRequest& request) {
  const Scenario scenario = load(opts);
  const std::vector<SweepRow> rows = cmd_sweep(scenario, request);
  write_output(opts, "sweep.csv",
               [&](std::ostream& os) { write_sweep_csv(os, request.key, rows); });
  if (csv(opts)) {
    write_sweep_csv(std::cout, request.key, rows);
  } else {
    int failed = 0;
    for (const auto& row : rows) failed += row.error.empty() ? 0 : 1;
    std::cout << "[sweep]\n"
              << "key = " << request.key << '\n'
              << "points = " << rows.size() << '\n'
              << "failed_points = " << failed << '\n'
              << "R2_first = " << rows.front().thresholds.R2 << '\n'
              << "R2_last = " << rows.back().thresholds.R2 << '\n';
  }
  return kExitOk;
}

int run_check_global(const CommonOptions& opts, int lattice) {
  const Scenario scenario = load(opts);
  const GlobalCheckResult result = cmd_check_global(scenario, opts.grid, lattice);
  write_output(opts, "report.txt",
               [&](std::ostream& os) { write_global_report(os, result); });
  if (!result.surface.empty())
    write_output(opts, "surface.csv",
                 [&](std::ostream& os) { write_surface_csv(os, result.surface); });
  if (csv(opts))
    write_surface_csv(std::cout, result.surface);
  else
    write_global_report(std::cout, result);
  return kExitOk;
}

int run_reproduce(const CommonOptions& opts, const std::string& id_text) {
  const auto id = parse_example_id(id_text);
  if (!id)
    throw ConfigError({"reproduce: unknown example '" + id_text +
                       "' (expected 6.1, 6.2, 6.3 or 6.4)"});
  const ReproductionResult result = cmd_reproduce(*id, {opts.grid});
  write_output(opts, "report.txt", [&](std::ostream& os) {
    write_reproduction(os, result);
    os << '\n';
    write_report(os, result.analysis);
    os << '\n';
    write_simulation_summary(os, result.simulation);
  });
  write_output(opts, "timeseries.csv", [&](std::ostream& os) {
    write_trajectory_csv(os, result.simulation.trajectory);
  });
  if (csv(opts)) {
    std::cout << "name,source,passed\n";
    for (const auto& a : result.assertions)
      std::cout << '"' << a.name << "\"," << a.source << ','
                << (a.passed ? "true" : "false") << '\n';
  } else {
    write_reproduction(std::cout, result);
  }
  return result.passed() ? kExitOk : kExitReproduction;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-strain epidemic model with vaccination: analysis and simulation"};
  app.require_subcommand(1);

  CommonOptions analyze_opts, simulate_opts, sweep_opts, global_opts, reproduce_opts;
  SweepRequest sweep;
  int lattice = 0;
  std::string example;

  auto* analyze = app.add_subcommand("analyze", "Thresholds, equilibria and stability");
  add_common(*analyze, analyze_opts, true);

  auto* simulate = app.add_subcommand("simulate", "Integrate from the initial state");
  add_common(*simulate, simulate_opts, true);

  auto* sweep_cmd = app.add_subcommand("sweep", "Thresholds and verdicts over a parameter grid");
  add_common(*sweep_cmd, sweep_opts, true);
  sweep_cmd->add_option("--key", sweep.key, "Numeric field, e.g. params.r")->required();
  sweep_cmd->add_option("--from", sweep.from, "First value")->required();
  sweep_cmd->add_option("--to", sweep.to, "Last value")->required();
  sweep_cmd->add_option("--n", sweep.n, "Number of grid points");
  sweep_cmd->add_flag("--thresholds-only", sweep.thresholds_only,
                      "Skip equilibrium solves");
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads (0 = all cores)");

  auto* global = app.add_subcommand("check-global", "Global-stability condition scans");
  add_common(*global, global_opts, true);
  global->add_option("--lattice", lattice,
                     "Points per coordinate of the exhaustive E3 lattice (0 = off)");

  auto* reproduce = app.add_subcommand("reproduce", "Run a built-in example and check it");
  add_common(*reproduce, reproduce_opts, false);
  reproduce->add_option("example", example, "6.1, 6.2, 6.3 or 6.4")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*analyze) return run_analyze(analyze_opts);
    if (*simulate) return run_simulate(simulate_opts);
    if (*sweep_cmd) return run_sweep(sweep_opts, sweep);
    if (*global) return run_check_global(global_opts, lattice);
    if (*reproduce) return run_reproduce(reproduce_opts, example);
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& issue : e.issues()) std::cerr << "  " << issue << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedLimitError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IntegrationError& e) {
    std::cerr << "integration error at t = " << e.time() << ": " << e.what() << '\n';
    return kExitSolver;
  } catch (const twostrain::Error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
