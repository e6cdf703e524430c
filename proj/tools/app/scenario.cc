#include "scenario.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "twostrain/format.h"

namespace twostrain::app {
namespace {

namespace pt = boost::property_tree;

std::string join(const std::vector<std::string>& issues) {
  std::string out = "invalid scenario:";
  for (const auto& issue : issues) out += "\n  " + issue;
  return out;
}

enum class Check { kPositive, kNonNegative };

struct NumericField {
  std::string_view section;
  std::string_view key;
  double& (*ref)(Scenario&);
  bool required;
  Check check;
};

// clang-format off
constexpr NumericField kFields[] = {
    {"params", "Lambda", [](Scenario& s) -> double& { return s.params.Lambda; }, true, Check::kPositive},
    {"params", "mu",     [](Scenario& s) -> double& { return s.params.mu; },     true, Check::kPositive},
    {"params", "r",      [](Scenario& s) -> double& { return s.params.r; },      true, Check::kNonNegative},
    {"params", "k",      [](Scenario& s) -> double& { return s.params.k; },      true, Check::kNonNegative},
    {"params", "gamma1", [](Scenario& s) -> double& { return s.params.gamma1; }, true, Check::kNonNegative},
    {"params", "gamma2", [](Scenario& s) -> double& { return s.params.gamma2; }, true, Check::kNonNegative},
    {"params", "v1",     [](Scenario& s) -> double& { return s.params.v1; },     true, Check::kNonNegative},
    {"params", "v2",     [](Scenario& s) -> double& { return s.params.v2; },     true, Check::kNonNegative},
    {"incidence1", "beta", [](Scenario& s) -> double& { return s.incidence1.beta; }, true,  Check::kPositive},
    {"incidence1", "zeta", [](Scenario& s) -> double& { return s.incidence1.zeta; }, false, Check::kNonNegative},
    {"incidence2", "beta", [](Scenario& s) -> double& { return s.incidence2.beta; }, true,  Check::kPositive},
    {"incidence2", "zeta", [](Scenario& s) -> double& { return s.incidence2.zeta; }, false, Check::kNonNegative},
    {"initial", "S",  [](Scenario& s) -> double& { return s.x0.S; },  true, Check::kNonNegative},
    {"initial", "V1", [](Scenario& s) -> double& { return s.x0.V1; }, true, Check::kNonNegative},
    {"initial", "I1", [](Scenario& s) -> double& { return s.x0.I1; }, true, Check::kNonNegative},
    {"initial", "I2", [](Scenario& s) -> double& { return s.x0.I2; }, true, Check::kNonNegative},
    {"integrator", "rtol",            [](Scenario& s) -> double& { return s.integrator.rtol; },            false, Check::kPositive},
    {"integrator", "atol",            [](Scenario& s) -> double& { return s.integrator.atol; },            false, Check::kPositive},
    {"integrator", "max_step",        [](Scenario& s) -> double& { return s.integrator.max_step; },        false, Check::kPositive},
    {"integrator", "t_end",           [](Scenario& s) -> double& { return s.integrator.t_end; },           false, Check::kPositive},
    {"integrator", "sample_interval", [](Scenario& s) -> double& { return s.integrator.sample_interval; }, false, Check::kPositive},
    {"integrator", "convergence_tol", [](Scenario& s) -> double& { return s.integrator.convergence_tol; }, false, Check::kPositive},
    {"integrator", "tail_window",     [](Scenario& s) -> double& { return s.integrator.tail_window; },     false, Check::kNonNegative},
};
// clang-format on

constexpr std::string_view kSections[] = {"params",  "incidence1", "incidence2",
                                          "initial", "integrator", "outputs"};
constexpr std::string_view kOutputKeys[] = {"report", "timeseries", "surface"};

std::string path_of(std::string_view section, std::string_view key) {
  return std::string(section) + "." + std::string(key);
}

const NumericField* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : kFields)
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

std::optional<double> parse_number(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() ||
      !std::isfinite(value))
    return std::nullopt;
  return value;
}

std::optional<bool> parse_bool(std::string_view text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  return std::nullopt;
}

bool& output_flag(Scenario& s, std::string_view key) {
  if (key == "report") return s.outputs.report;
  if (key == "timeseries") return s.outputs.timeseries;
  return s.outputs.surface;
}

void check_value(const NumericField& f, double value,
                 std::vector<std::string>& issues) {
  const bool ok = f.check == Check::kPositive ? value > 0.0 : value >= 0.0;
  if (!ok) {
    issues.push_back(path_of(f.section, f.key) +
                     (f.check == Check::kPositive ? ": must be > 0"
                                                  : ": must be >= 0") +
                     " (got " + format_double(value) + ")");
  }
}

void validate_into(const Scenario& scenario, std::vector<std::string>& issues) {
  Scenario s = scenario;
  for (const auto& f : kFields) {
    const double value = f.ref(s);
    if (!std::isfinite(value)) {
      issues.push_back(path_of(f.section, f.key) + ": must be finite");
    } else {
      check_value(f, value, issues);
    }
  }
  if (scenario.x0.R && !(*scenario.x0.R >= 0.0 && std::isfinite(*scenario.x0.R)))
    issues.push_back("initial.R: must be finite and >= 0");
  const std::pair<const char*, const IncidenceDescriptor*> strains[] = {
      {"incidence1", &scenario.incidence1}, {"incidence2", &scenario.incidence2}};
  for (const auto& [section, d] : strains) {
    if (d->family == IncidenceFamily::kCustom)
      issues.push_back(std::string(section) +
                       ".family: custom incidence cannot be read from a file");
    if (d->family == IncidenceFamily::kBilinear && d->zeta != 0.0)
      issues.push_back(std::string(section) +
                       ".zeta: bilinear incidence has no saturation; must be 0");
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(join(issues)), issues_(std::move(issues)) {}

IncidenceSpec IncidenceDescriptor::build() const {
  switch (family) {
    case IncidenceFamily::kBilinear:
      return IncidenceSpec::bilinear(beta);
    case IncidenceFamily::kSaturatedS:
      return IncidenceSpec::saturated_s(beta, zeta);
    case IncidenceFamily::kSaturatedI2:
      return IncidenceSpec::saturated_i2(beta, zeta);
    case IncidenceFamily::kCustom:
      break;
  }
  throw ConfigError({"custom incidence cannot be built from a descriptor"});
}

Model Scenario::model() const {
  return {params, incidence1.build(), incidence2.build()};
}

Scenario parse_scenario(std::istream& in, std::string_view source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string(source) + ": line " + std::to_string(e.line()) +
                       ": " + e.message()});
  }

  Scenario scenario;
  std::vector<std::string> issues;
  std::vector<std::string> seen;

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      issues.push_back(section + ": key outside of any section");
      continue;
    }
    if (std::find(std::begin(kSections), std::end(kSections), section) ==
        std::end(kSections)) {
      issues.push_back(section + ": unknown section");
      continue;
    }
    for (const auto& [key, node] : body) {
      const std::string path = path_of(section, key);
      const std::string text = node.get_value<std::string>();
      if (section == "outputs") {
        if (std::find(std::begin(kOutputKeys), std::end(kOutputKeys), key) ==
            std::end(kOutputKeys)) {
          issues.push_back(path + ": unknown key");
        } else if (const auto b = parse_bool(text)) {
          output_flag(scenario, key) = *b;
        } else {
          issues.push_back(path + ": expected true or false (got '" + text + "')");
        }
        continue;
      }
      if (key == "family" && section.rfind("incidence", 0) == 0) {
        seen.push_back(path);
        if (const auto family = parse_family(text)) {
          (section == "incidence1" ? scenario.incidence1 : scenario.incidence2)
              .family = *family;
        } else {
          issues.push_back(path + ": unknown family '" + text +
                           "' (expected bilinear, saturated_s or saturated_i2)");
        }
        continue;
      }
      if (section == "initial" && key == "R") {
        if (const auto v = parse_number(text)) {
          scenario.x0.R = *v;
        } else {
          issues.push_back(path + ": not a finite number ('" + text + "')");
        }
        continue;
      }
      if (section == "integrator" && key == "max_steps") {
        const auto v = parse_number(text);
        if (v && *v >= 1.0 && *v <= 1e15 && std::floor(*v) == *v) {
          scenario.integrator.max_steps = static_cast<long>(*v);
        } else {
          issues.push_back(path + ": expected a positive integer ('" + text + "')");
        }
        continue;
      }
      const NumericField* field = find_field(section, key);
      if (!field) {
        issues.push_back(path + ": unknown key");
        continue;
      }
      seen.push_back(path);
      if (const auto v = parse_number(text)) {
        field->ref(scenario) = *v;
      } else {
        issues.push_back(path + ": not a finite number ('" + text + "')");
      }
    }
  }

  auto was_seen = [&](const std::string& path) {
    return std::find(seen.begin(), seen.end(), path) != seen.end();
  };
  for (const auto& f : kFields) {
    const std::string path = path_of(f.section, f.key);
    if (f.required && !was_seen(path)) issues.push_back(path + ": missing");
  }
  for (const char* section : {"incidence1", "incidence2"}) {
    const std::string path = path_of(section, "family");
    if (!was_seen(path)) issues.push_back(path + ": missing");
  }

  if (issues.empty()) validate_into(scenario, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return scenario;
}

Scenario parse_scenario_text(std::string_view text, std::string_view source) {
  std::istringstream in{std::string(text)};
  return parse_scenario(in, source);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open scenario file"});
  return parse_scenario(in, path.string());
}

std::string serialize_scenario(const Scenario& scenario) {
  Scenario s = scenario;
  std::ostringstream os;
  std::string_view current;
  for (const auto& f : kFields) {
    if (f.section != current) {
      if (!current.empty()) os << '\n';
      current = f.section;
      os << '[' << f.section << "]\n";
      if (f.section == "incidence1" || f.section == "incidence2") {
        const auto& d = f.section == "incidence1" ? s.incidence1 : s.incidence2;
        os << "family = " << family_name(d.family) << '\n';
      }
    }
    os << f.key << " = " << format_double(f.ref(s)) << '\n';
    if (f.section == "initial" && f.key == "I2" && s.x0.R)
      os << "R = " << format_double(*s.x0.R) << '\n';
    if (f.section == "integrator" && f.key == "tail_window")
      os << "max_steps = " << s.integrator.max_steps << '\n';
  }
  os << "\n[outputs]\n";
  for (const auto key : kOutputKeys)
    os << key << " = " << (output_flag(s, key) ? "true" : "false") << '\n';
  return os.str();
}

double get_numeric(const Scenario& scenario, std::string_view key) {
  const auto dot = key.find('.');
  const NumericField* field =
      dot == std::string_view::npos
          ? nullptr
          : find_field(key.substr(0, dot), key.substr(dot + 1));
  if (!field)
    throw ConfigError({std::string(key) + ": not a numeric scenario field"});
  Scenario copy = scenario;
  return field->ref(copy);
}

void set_numeric(Scenario& scenario, std::string_view key, double value) {
  const auto dot = key.find('.');
  const NumericField* field =
      dot == std::string_view::npos
          ? nullptr
          : find_field(key.substr(0, dot), key.substr(dot + 1));
  if (!field)
    throw ConfigError({std::string(key) + ": not a numeric scenario field"});
  field->ref(scenario) = value;
}

std::vector<std::string> numeric_keys() {
  std::vector<std::string> out;
  for (const auto& f : kFields) out.push_back(path_of(f.section, f.key));
  return out;
}

void validate(const Scenario& scenario) {
  std::vector<std::string> issues;
  validate_into(scenario, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace twostrain::app
