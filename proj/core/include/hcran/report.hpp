#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcran/dinkelbach.hpp"
#include "hcran/scenario.hpp"

namespace hcran {

struct SweepSpec {
  std::string variable = "P_max";  ///< theta, P_max, K or M
  std::vector<double> grid;        ///< nonempty, ascending
  std::vector<std::string> schemes{"eee_max"};
  std::size_t replications = 1;    ///< seeds base_seed, base_seed + 1, ...
  std::uint64_t base_seed = 1;
};

/// Empty when the spec is usable; otherwise one message per problem.
std::vector<std::string> validate_sweep(const SweepSpec& spec);

/// Scenario with the sweep variable set to `value` (theta and P_max are
/// broadcast to every user or RRH; K and M resize the per-entity lists).
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& variable,
                                 double value);

struct SweepRow {
  std::string variable;
  double value = 0.0;
  std::string scheme;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  bool ok = false;     ///< false when the run threw
  SolveReport report;  ///< report.error carries the diagnostic on failure
};

/// Every (grid value, replication, scheme) triple. The channel draw depends
/// only on the seed and sizes, so theta and P_max sweeps share common random
/// numbers across the grid. A failed run is recorded and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& base,
                                const SolverSettings& settings);

/// Header of the CSV export, in order.
const std::vector<std::string>& csv_columns();

/// One row per run. Numbers are printed with 17 significant digits; wall
/// time is left out so identical inputs give identical bytes.
std::string to_csv(const std::vector<SweepRow>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);

/// Full nested reports including Dinkelbach history, residuals and timing.
std::string report_to_json(const SolveReport& r);
std::string sweep_to_json(const SweepSpec& spec, const ScenarioConfig& base,
                          const std::vector<SweepRow>& rows);

}  // namespace hcran
