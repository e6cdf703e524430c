#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <thread>

#include "commands.h"
#include "twostrain/format.h"

namespace twostrain::app {
namespace {

SweepRow evaluate(Scenario scenario, const std::string& key, double value,
                  bool thresholds_only) {
  SweepRow row;
  row.value = value;
  try {
    set_numeric(scenario, key, value);
    validate(scenario);
    const Model model = scenario.model();
    if (thresholds_only) {
      row.thresholds = thresholds(model);
      return row;
    }
    const EquilibriumSet set = solve_all(model);
    row.thresholds = set.thresholds;
    row.e1 = set.e1.has_value();
    row.e2_roots = static_cast<int>(set.e2.roots.size());
    row.e3 = set.e3.has_value();
    row.e0_verdict = classify(model, set.e0).verdict;
    if (set.e1) row.e1_verdict = classify(model, *set.e1).verdict;
    if (!set.e2.roots.empty())
      row.e2_verdict = classify(model, set.e2.roots.front()).verdict;
    if (set.e3) row.e3_verdict = classify(model, *set.e3).verdict;
  } catch (const ConfigError& e) {
    row.error = e.issues().empty() ? e.what() : e.issues().front();
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

std::string optional_num(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string_view optional_verdict(const std::optional<Verdict>& v) {
  return v ? verdict_name(*v) : std::string_view();
}

std::string csv_field(std::string text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

std::vector<SweepRow> cmd_sweep(const Scenario& scenario,
                                const SweepRequest& request) {
  std::vector<std::string> issues;
  const auto keys = numeric_keys();
  if (std::find(keys.begin(), keys.end(), request.key) == keys.end())
    issues.push_back("sweep.key: '" + request.key + "' is not a numeric scenario field");
  if (request.n < 2) issues.push_back("sweep.n: must be >= 2");
  if (!std::isfinite(request.from) || !std::isfinite(request.to))
    issues.push_back("sweep.from/to: must be finite");
  if (!issues.empty()) throw ConfigError(std::move(issues));
  validate(scenario);

  const auto n = static_cast<std::size_t>(request.n);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    values[i] = i + 1 == n ? request.to : request.from + t * (request.to - request.from);
  }

  unsigned workers = request.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  std::vector<SweepRow> rows(n);
  std::vector<std::future<void>> tasks;
  tasks.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers)
        rows[i] = evaluate(scenario, request.key, values[i], request.thresholds_only);
    }));
  }
  for (auto& task : tasks) task.get();
  return rows;
}

void write_sweep_csv(std::ostream& os, std::string_view key,
                     const std::vector<SweepRow>& rows) {
  os << key
     << ",R1,R2,R0,R2_bar,R1_tilde,e1_exists,e2_roots,e3_exists,"
        "e0_verdict,e1_verdict,e2_verdict,e3_verdict,error\n";
  for (const auto& row : rows) {
    const Thresholds& th = row.thresholds;
    os << format_double(row.value) << ',' << format_double(th.R1) << ','
       << format_double(th.R2) << ',' << format_double(th.R0) << ','
       << optional_num(th.R2_bar) << ',' << optional_num(th.R1_tilde) << ','
       << (row.e1 ? 1 : 0) << ',' << row.e2_roots << ',' << (row.e3 ? 1 : 0)
       << ',' << optional_verdict(row.e0_verdict) << ','
       << optional_verdict(row.e1_verdict) << ','
       << optional_verdict(row.e2_verdict) << ','
       << optional_verdict(row.e3_verdict) << ',' << csv_field(row.error) << '\n';
  }
}

}  // namespace twostrain::app
