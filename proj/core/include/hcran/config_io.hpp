#pragma once

#include <string>

#include "hcran/dualsolver.hpp"
#include "hcran/report.hpp"
#include "hcran/scenario.hpp"

namespace hcran {

/// Scenario plus solver settings as read from one file.
struct ScenarioFile {
  ScenarioConfig cfg;
  SolverSettings settings;
};

/// Parses a scenario document. `format` is "yaml" or "json"; YAML is a
/// superset of JSON, so "yaml" accepts both. Sections:
///   topology:   K, M, Z, cell_radius, d0, pathloss_exponent
///   spectrum:   B, W_mc, W_z, T_f, N0 | noise_dbm
///   qos:        theta, R_fronthaul, R_mbs
///   power:      P_max, zeta, zeta_is_efficiency, P_c, P_f
///   simulation: seed, num_samples
///   solver:     any SolverSettings field
/// Per-entity fields take a list or a scalar broadcast to every entity.
/// Unknown keys are errors. Throws std::runtime_error with the offending key.
ScenarioFile parse_scenario(const std::string& text, const std::string& format = "yaml");

/// Reads a file; ".json" selects JSON, anything else YAML.
ScenarioFile load_scenario(const std::string& path);

/// Canonical JSON form of a scenario (every section, lists expanded).
std::string scenario_to_json(const ScenarioConfig& cfg, const SolverSettings& settings);
std::string scenario_to_yaml(const ScenarioConfig& cfg, const SolverSettings& settings);

struct SweepFile {
  SweepSpec spec;
  ScenarioFile base;
};

/// Sweep document with two sections:
///   sweep:    variable, grid, schemes, replications, base_seed
///   scenario: an inline scenario mapping, or a path relative to the file
SweepFile parse_sweep(const std::string& text, const std::string& format = "yaml",
                      const std::string& base_dir = ".");
SweepFile load_sweep(const std::string& path);

std::string read_text_file(const std::string& path);
/// Writes `content`, creating parent directories. Throws std::runtime_error
/// naming the path when it cannot be written.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace hcran
