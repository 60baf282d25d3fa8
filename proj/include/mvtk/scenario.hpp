#ifndef MVTK_SCENARIO_HPP
#define MVTK_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvtk/dynamics.hpp"
#include "mvtk/grid.hpp"

namespace mvtk::scenario {

enum class Name {
  landau,
  two_stream,
  bracket_check,
  gnh_demo,
  ec_stability,
  controlled_stabilization,
  convergence
};

std::string to_string(Name n);
std::optional<Name> name_from_string(const std::string& s);

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::vector<std::string>& violations);
  std::vector<std::string> violations;
};

// Optional antenna forcing attached to the evolution scenarios.
struct ControlSpec {
  bool active = false;
  std::string kind = "current_coupling";  // or casimir_shaping
  int mode = 1;                            // spatial profile cos(2 pi mode x / L)
  double amplitude = 0.0;
  double frequency = 0.0;                  // 0: constant drive
  double v_center = 0.0, v_width = 1.0;    // shaping weight bump
};

struct RunConfig {
  Name scenario = Name::landau;
  PhaseGrid grid;
  ScenarioParams params;
  ControlSpec control;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  std::string resolution = "ref";
};

RunConfig default_config(Name scenario);

// Parses a TOML text, fills defaults for the scenario, applies the resolution
// preset then explicit keys, validates everything and rejects unknown keys.
// All violations are reported together.
RunConfig parse_config(const std::string& text,
                       std::optional<Name> cli_scenario = std::nullopt);

nlohmann::ordered_json effective_config_json(const RunConfig& cfg);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct Report {
  Name scenario;
  bool pass = false;
  std::vector<Check> checks;
  nlohmann::ordered_json json;  // full machine-readable report
  std::vector<std::pair<std::string, std::string>> artifacts;  // filename, body
};

// Individual scenario drivers.  They never touch the filesystem; run_scenario
// handles artifact writing.  The optional series output carries the
// diagnostics of dynamic scenarios.
Report landau(const RunConfig& cfg, DiagnosticSeries* series_out = nullptr);
Report two_stream(const RunConfig& cfg, DiagnosticSeries* series_out = nullptr);
Report bracket_check(const RunConfig& cfg);
Report gnh_demo(const RunConfig& cfg);
Report ec_stability(const RunConfig& cfg);
Report controlled_stabilization(const RunConfig& cfg);
Report convergence(const RunConfig& cfg);

Report dispatch(const RunConfig& cfg, DiagnosticSeries* series_out = nullptr);

// Runs the scenario and writes effective_config.json, report.json,
// summary.json and (for dynamic scenarios) diagnostics.csv into cfg.out_dir.
// Returns the process exit status: 0 iff all checks passed.
int run_scenario(const RunConfig& cfg);

}  // namespace mvtk::scenario

#endif
