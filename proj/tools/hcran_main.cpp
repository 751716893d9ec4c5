#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hcran/baselines.hpp"
#include "hcran/config_io.hpp"
#include "hcran/report.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::vector<std::string> schemes;
  std::string out_dir;
};

void apply(hcran::ScenarioConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.samples) cfg.num_samples = *o.samples;
}

bool report_violations(const hcran::ScenarioConfig& cfg) {
  const auto bad = hcran::validate_config(cfg);
  for (const auto& v : bad) std::cerr << "invalid " << v.field << ": " << v.rule << "\n";
  return bad.empty();
}

int cmd_validate(const std::string& path) {
  const auto file = hcran::load_scenario(path);
  if (!report_violations(file.cfg)) return 1;
  file.settings.validate();
  std::cout << path << ": ok (K=" << file.cfg.K << ", M=" << file.cfg.M << ", Z=" << file.cfg.Z
            << ", N=" << file.cfg.num_samples << ")\n";
  return 0;
}

int cmd_solve(const std::string& path, const Overrides& o) {
  auto file = hcran::load_scenario(path);
  apply(file.cfg, o);
  if (!report_violations(file.cfg)) return 1;
  const auto inst = hcran::instantiate(file.cfg);
  const hcran::Problem pb(inst.cfg, inst.samples);
  const std::vector<std::string> schemes = o.schemes.empty() ? std::vector<std::string>{"eee_max"} : o.schemes;

  std::vector<hcran::SweepRow> rows;
  int status = 0;
  for (const auto& scheme : schemes) {
    hcran::SweepRow row;
    row.variable = "none";
    row.scheme = scheme;
    row.seed = inst.cfg.seed;
    try {
      row.report = hcran::solve_scheme(scheme, pb, file.settings);
      row.ok = true;
    } catch (const std::exception& e) {
      row.report.scheme = scheme;
      row.report.feasible = false;
      row.report.error = e.what();
      status = 1;
    }
    const auto& r = row.report;
    if (row.ok) {
      std::printf("%-10s eee=%.6g bits/frame/W  ec=%.6g bits/frame  power=%.6g W  iters=%d  pairs=%zu%s%s\n",
                  scheme.c_str(), r.eee, r.total_ec, r.power.total, r.iterations,
                  r.assignment.pair_count(), r.converged ? "" : "  (not converged)",
                  r.feasible ? "" : "  (infeasible)");
    } else {
      std::fprintf(stderr, "%s failed: %s\n", scheme.c_str(), r.error.c_str());
    }
    rows.push_back(std::move(row));
  }
  if (!o.out_dir.empty()) {
    const std::filesystem::path dir(o.out_dir);
    hcran::write_text_file((dir / "solve.csv").string(), hcran::to_csv(rows));
    for (const auto& row : rows) {
      hcran::write_text_file((dir / ("solve_" + row.scheme + ".json")).string(),
                             hcran::report_to_json(row.report));
    }
    std::cout << "wrote " << (dir / "solve.csv").string() << "\n";
  }
  return status;
}

int cmd_sweep(const std::string& path, const Overrides& o) {
  auto file = hcran::load_sweep(path);
  apply(file.base.cfg, o);
  if (o.seed) file.spec.base_seed = *o.seed;
  if (!o.schemes.empty()) file.spec.schemes = o.schemes;
  if (!report_violations(file.base.cfg)) return 1;
  const auto bad = hcran::validate_sweep(file.spec);
  for (const auto& b : bad) std::cerr << "invalid sweep: " << b << "\n";
  if (!bad.empty()) return 1;

  const auto rows = hcran::run_sweep(file.spec, file.base.cfg, file.base.settings);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.ok ? 0 : 1;
  const std::string csv = hcran::to_csv(rows);
  if (o.out_dir.empty()) {
    std::cout << csv;
  } else {
    const std::filesystem::path dir(o.out_dir);
    hcran::write_text_file((dir / "sweep.csv").string(), csv);
    hcran::write_text_file((dir / "sweep.json").string(),
                           hcran::sweep_to_json(file.spec, file.base.cfg, rows));
    std::cout << "wrote " << rows.size() << " rows to " << (dir / "sweep.csv").string() << "\n";
  }
  if (failed) std::cerr << failed << " run(s) failed; see the error column\n";
  return failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NOMA H-CRAN effective energy efficiency solver"};
  app.require_subcommand(1);

  Overrides o;
  std::string path;
  std::uint64_t seed = 0;
  std::size_t samples = 0;

  auto add_common = [&](CLI::App* sub, bool schemes) {
    sub->add_option("--seed", seed, "RNG seed (base seed for sweeps)");
    sub->add_option("--samples,-N", samples, "Monte-Carlo fading states")->check(CLI::PositiveNumber);
    sub->add_option("--out,-o", o.out_dir, "Output directory");
    if (schemes) {
      sub->add_option("--scheme,-s", o.schemes, "eee_max, ec_max, no_coop, exhaustive, greedy")
          ->check(CLI::IsMember(hcran::scheme_names()));
    }
  };

  auto* solve = app.add_subcommand("solve", "Solve one scenario");
  solve->add_option("scenario", path, "Scenario file (.yaml or .json)")->required()->check(CLI::ExistingFile);
  add_common(solve, true);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("sweep", path, "Sweep file (.yaml or .json)")->required()->check(CLI::ExistingFile);
  add_common(sweep, true);

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", path, "Scenario file (.yaml or .json)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {solve, sweep}) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--samples")) o.samples = samples;
  }

  try {
    if (solve->parsed()) return cmd_solve(path, o);
    if (sweep->parsed()) return cmd_sweep(path, o);
    return cmd_validate(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
