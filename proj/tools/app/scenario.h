#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "twostrain/errors.h"
#include "twostrain/incidence.h"
#include "twostrain/model.h"
#include "twostrain/simulate.h"

namespace twostrain::app {

/// Invalid scenario or command-line input. Carries one message per
/// offending key path, e.g. "params.mu: must be > 0".
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Scenario-file description of one strain's incidence law.
struct IncidenceDescriptor {
  IncidenceFamily family = IncidenceFamily::kBilinear;
  double beta = 0.0;
  double zeta = 0.0;

  IncidenceSpec build() const;
};

struct OutputSelection {
  bool report = true;
  bool timeseries = true;
  bool surface = false;
};

struct Scenario {
  ModelParams params;
  IncidenceDescriptor incidence1;
  IncidenceDescriptor incidence2;
  State x0;
  IntegratorOptions integrator;
  OutputSelection outputs;

  Model model() const;
};

/// Parses the INI-style scenario format. Every problem found is collected
/// and reported together in one ConfigError.
Scenario parse_scenario(std::istream& in, std::string_view source = "<input>");
Scenario parse_scenario_text(std::string_view text,
                             std::string_view source = "<input>");
Scenario load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario; numbers use shortest round-trip decimals.
std::string serialize_scenario(const Scenario& scenario);

/// Numeric fields addressable as "section.key" (e.g. "params.r",
/// "incidence2.zeta"). Throws ConfigError for unknown or non-numeric keys.
double get_numeric(const Scenario& scenario, std::string_view key);
void set_numeric(Scenario& scenario, std::string_view key, double value);

/// Key paths accepted by get_numeric / set_numeric.
std::vector<std::string> numeric_keys();

/// Re-runs validation of a scenario assembled in code.
void validate(const Scenario& scenario);

}  // namespace twostrain::app
