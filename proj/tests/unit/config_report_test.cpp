#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "hcran/config_io.hpp"
#include "hcran/report.hpp"

using namespace hcran;
namespace fs = std::filesystem;

namespace {

const char* kScenario = R"(topology:
  K: 2
  M: 1
  Z: 1
spectrum:
  W_z: 150e3
  noise_dbm: -100
qos:
  theta: [1e-4, 1e-3]
  R_fronthaul: 500
power:
  P_max: 0.5
simulation:
  seed: 9
  num_samples: 64
solver:
  inner_tol: 1e-6
  rate_repair: false
)";

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hcran_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(ConfigIo, YamlSectionsAndBroadcast) {
  const ScenarioFile f = parse_scenario(kScenario);
  EXPECT_EQ(f.cfg.K, 2u);
  EXPECT_EQ(f.cfg.W_z, std::vector<double>{150e3});
  EXPECT_EQ(f.cfg.theta, (std::vector<double>{1e-4, 1e-3}));
  EXPECT_EQ(f.cfg.R_fronthaul, std::vector<double>{500.0});
  EXPECT_EQ(f.cfg.P_max, std::vector<double>{0.5});
  EXPECT_NEAR(f.cfg.N0, std::pow(10.0, -13.0) / f.cfg.B, 1e-32);
  EXPECT_EQ(f.cfg.seed, 9u);
  EXPECT_EQ(f.settings.inner_tol, 1e-6);
  EXPECT_FALSE(f.settings.rate_repair);
  // untouched fields keep their defaults
  EXPECT_EQ(f.cfg.P_f, std::vector<double>{1.0});
}

TEST(ConfigIo, RejectsUnknownAndConflictingKeys) {
  EXPECT_THROW(parse_scenario("topology:\n  K: 2\n  Kay: 3\n"), std::runtime_error);
  EXPECT_THROW(parse_scenario("extras:\n  a: 1\n"), std::runtime_error);
  EXPECT_THROW(parse_scenario("spectrum:\n  N0: 1e-20\n  noise_dbm: -100\n"), std::runtime_error);
  EXPECT_THROW(parse_scenario("topology:\n  K: many\n"), std::runtime_error);
  try {
    parse_scenario("power:\n  P_maxx: 1\n");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("P_maxx"), std::string::npos);
  }
}

TEST(ConfigIo, JsonAndYamlRoundTrip) {
  const ScenarioFile f = parse_scenario(kScenario);
  const ScenarioFile j = parse_scenario(scenario_to_json(f.cfg, f.settings), "json");
  const ScenarioFile y = parse_scenario(scenario_to_yaml(f.cfg, f.settings), "yaml");
  for (const ScenarioFile* g : {&j, &y}) {
    EXPECT_EQ(g->cfg.theta, f.cfg.theta);
    EXPECT_EQ(g->cfg.N0, f.cfg.N0);
    EXPECT_EQ(g->cfg.W_z, f.cfg.W_z);
    EXPECT_EQ(g->cfg.num_samples, f.cfg.num_samples);
    EXPECT_EQ(g->settings.inner_tol, f.settings.inner_tol);
    EXPECT_EQ(g->settings.rate_repair, f.settings.rate_repair);
    EXPECT_EQ(instantiate(g->cfg).samples, instantiate(f.cfg).samples);
  }
}

TEST(ConfigIo, FilesAndDirectories) {
  const fs::path dir = scratch_dir("files");
  const std::string path = (dir / "a" / "b" / "s.json").string();
  const ScenarioFile f = parse_scenario(kScenario);
  write_text_file(path, scenario_to_json(f.cfg, f.settings));
  EXPECT_EQ(load_scenario(path).cfg.theta, f.cfg.theta);
  EXPECT_THROW(read_text_file((dir / "missing.yaml").string()), std::runtime_error);
  // a regular file in place of a directory
  EXPECT_THROW(write_text_file(path + "/x.csv", "x"), std::runtime_error);
  fs::remove_all(dir);
}

TEST(ConfigIo, SweepWithRelativeScenario) {
  const fs::path dir = scratch_dir("sweep");
  write_text_file((dir / "base.yaml").string(), kScenario);
  write_text_file((dir / "sweep.yaml").string(),
                  "sweep:\n  variable: theta\n  grid: [1e-5, 1e-3]\n  schemes: [no_coop]\n"
                  "  replications: 2\n  base_seed: 4\nscenario: base.yaml\n");
  const SweepFile s = load_sweep((dir / "sweep.yaml").string());
  EXPECT_EQ(s.spec.variable, "theta");
  EXPECT_EQ(s.spec.grid.size(), 2u);
  EXPECT_EQ(s.spec.replications, 2u);
  EXPECT_EQ(s.base.cfg.K, 2u);
  fs::remove_all(dir);
}

TEST(Report, SweepValidation) {
  SweepSpec s;
  EXPECT_FALSE(validate_sweep(s).empty());  // empty grid
  s.grid = {2.0, 1.0};
  EXPECT_FALSE(validate_sweep(s).empty());
  s.grid = {1.0, 2.0};
  EXPECT_TRUE(validate_sweep(s).empty());
  s.schemes = {"eee_max", "nope"};
  EXPECT_FALSE(validate_sweep(s).empty());
  s.schemes = {"eee_max"};
  s.replications = 0;
  EXPECT_FALSE(validate_sweep(s).empty());
  s.replications = 1;
  s.variable = "K";
  s.grid = {1.5};
  EXPECT_FALSE(validate_sweep(s).empty());
}

TEST(Report, ApplySweepValue) {
  const ScenarioConfig base = default_config(3, 2, 2);
  const ScenarioConfig k = apply_sweep_value(base, "K", 5);
  EXPECT_EQ(k.K, 5u);
  EXPECT_EQ(k.theta.size(), 5u);
  const ScenarioConfig p = apply_sweep_value(base, "P_max", 0.25);
  EXPECT_EQ(p.P_max, (std::vector<double>{0.25, 0.25}));
  const ScenarioConfig t = apply_sweep_value(base, "theta", 1e-3);
  EXPECT_EQ(t.theta, (std::vector<double>{1e-3, 1e-3, 1e-3}));
  EXPECT_TRUE(validate_config(apply_sweep_value(base, "M", 4)).empty());
}

TEST(Report, CsvExportIsConsistentAndDeterministic) {
  ScenarioConfig base = default_config(2, 1, 1);
  base.num_samples = 64;
  SweepSpec spec;
  spec.variable = "P_max";
  spec.grid = {0.5};
  spec.schemes = {"no_coop"};
  const auto rows = run_sweep(spec, base, SolverSettings{});
  ASSERT_EQ(rows.size(), 1u);
  const std::string csv = to_csv(rows);
  EXPECT_EQ(csv, to_csv(run_sweep(spec, base, SolverSettings{})));

  std::string header;
  for (const auto& c : csv_columns()) header += (header.empty() ? "" : ",") + c;
  EXPECT_EQ(csv.substr(0, csv.find('\n')), header);

  const CsvTable t = parse_csv(csv);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.header, csv_columns());
  const double ec = t.number(0, "total_ec"), power = t.number(0, "total_power");
  EXPECT_NEAR(t.number(0, "eee"), ec / power, 1e-12 * ec / power);
  EXPECT_EQ(t.number(0, "eee"), rows[0].report.eee);  // 17 digits round-trip exactly
  EXPECT_EQ(t.rows[0][t.column("scheme")], "no_coop");
  EXPECT_THROW(t.column("wall_time_s"), std::out_of_range);
}

TEST(Report, FailedRunsAreRecorded) {
  ScenarioConfig base = default_config(2, 1, 2);
  base.num_samples = 16;
  SweepSpec spec;
  spec.variable = "M";
  spec.grid = {1};
  spec.schemes = {"exhaustive"};
  SolverSettings s;
  s.max_exhaustive = 1;  // Z = 2 exceeds it
  const auto rows = run_sweep(spec, base, s);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].ok);
  EXPECT_FALSE(rows[0].report.error.empty());
  const CsvTable t = parse_csv(to_csv(rows));
  EXPECT_NE(t.rows[0][t.column("error")], "");
}

TEST(Report, CsvQuotedFields) {
  const CsvTable t = parse_csv("a,b\n\"x, y\",\"say \"\"hi\"\"\"\n");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], "x, y");
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
}

TEST(Report, JsonCarriesHistory) {
  ScenarioConfig cfg = default_config(2, 1, 1);
  cfg.num_samples = 64;
  const auto inst = instantiate(cfg);
  const Problem pb(inst.cfg, inst.samples);
  const SolveReport r = run(pb, SolverSettings{});
  const std::string js = report_to_json(r);
  EXPECT_NE(js.find("\"history\""), std::string::npos);
  EXPECT_NE(js.find("\"residuals\""), std::string::npos);
}
