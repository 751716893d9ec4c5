#include "hcran/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "hcran/baselines.hpp"
#include "json.hpp"

namespace hcran {

using json = nlohmann::json;

std::vector<std::string> validate_sweep(const SweepSpec& spec) {
  std::vector<std::string> out;
  const auto& v = spec.variable;
  if (v != "theta" && v != "P_max" && v != "K" && v != "M")
    out.push_back("variable must be one of theta, P_max, K, M (got '" + v + "')");
  if (spec.grid.empty()) out.push_back("grid must be nonempty");
  if (!std::is_sorted(spec.grid.begin(), spec.grid.end()))
    out.push_back("grid must be sorted ascending");
  for (double g : spec.grid) {
    if (!std::isfinite(g) || !(g > 0.0)) {
      out.push_back("grid values must be finite and > 0");
      break;
    }
    if ((v == "K" || v == "M") && g != std::floor(g)) {
      out.push_back("grid values for " + v + " must be integers");
      break;
    }
  }
  if (spec.replications < 1) out.push_back("replications must be >= 1");
  if (spec.schemes.empty()) out.push_back("scheme list must be nonempty");
  const auto& known = scheme_names();
  for (const auto& s : spec.schemes) {
    if (std::find(known.begin(), known.end(), s) == known.end())
      out.push_back("unknown scheme '" + s + "'");
  }
  return out;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& variable,
                                 double value) {
  ScenarioConfig cfg = base;
  if (variable == "theta") {
    cfg.theta.assign(cfg.K, value);
  } else if (variable == "P_max") {
    cfg.P_max.assign(cfg.M, value);
  } else if (variable == "K") {
    cfg.K = static_cast<std::size_t>(value);
    conform_sizes(cfg);
  } else if (variable == "M") {
    cfg.M = static_cast<std::size_t>(value);
    conform_sizes(cfg);
  } else {
    throw std::invalid_argument("unknown sweep variable '" + variable + "'");
  }
  return cfg;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& base,
                                const SolverSettings& settings) {
  const auto problems = validate_sweep(spec);
  if (!problems.empty()) throw std::invalid_argument("invalid sweep: " + problems.front());
  std::vector<SweepRow> rows;
  for (double value : spec.grid) {
    for (std::size_t rep = 0; rep < spec.replications; ++rep) {
      ScenarioConfig cfg = apply_sweep_value(base, spec.variable, value);
      cfg.seed = spec.base_seed + rep;
      std::unique_ptr<Problem> pb;
      std::string setup_error;
      try {
        const auto bad = validate_config(cfg);
        if (!bad.empty()) throw std::invalid_argument(bad.front().field + ": " + bad.front().rule);
        const ScenarioInstance inst = instantiate(cfg);
        pb = std::make_unique<Problem>(inst.cfg, inst.samples);
      } catch (const std::exception& e) {
        setup_error = e.what();
      }
      for (const auto& scheme : spec.schemes) {
        SweepRow row;
        row.variable = spec.variable;
        row.value = value;
        row.scheme = scheme;
        row.replication = rep;
        row.seed = cfg.seed;
        if (!pb) {
          row.report.scheme = scheme;
          row.report.seed = cfg.seed;
          row.report.feasible = false;
          row.report.error = setup_error;
        } else {
          try {
            row.report = solve_scheme(scheme, *pb, settings);
            row.ok = true;
          } catch (const std::exception& e) {
            row.report = SolveReport{};
            row.report.scheme = scheme;
            row.report.seed = cfg.seed;
            row.report.feasible = false;
            row.report.error = e.what();
          }
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "variable",       "value",          "scheme",       "replication",
      "seed",           "status",         "converged",    "approximate",
      "feasible",       "rates_met",      "iterations",     "eee",          "total_ec",
      "total_power",    "radiated_power", "static_power", "q_final",
      "F_final",        "pairs",          "min_c1",       "min_c4",
      "match_rounds",   "assignments_searched", "flagged_powers", "error"};
  return cols;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double min_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& row : rows) {
    const SolveReport& r = row.report;
    const PowerBreakdown& p = r.power;
    const double radiated = p.dynamic_native + p.dynamic_borrowed + p.dynamic_mbs_serving;
    std::vector<std::string> f{
        row.variable,
        num(row.value),
        row.scheme,
        std::to_string(row.replication),
        std::to_string(row.seed),
        row.ok ? "ok" : "error",
        r.converged ? "1" : "0",
        r.approximate ? "1" : "0",
        r.feasible ? "1" : "0",
        r.rates_met ? "1" : "0",
        std::to_string(r.iterations),
        num(r.eee),
        num(r.total_ec),
        num(p.total),
        num(radiated),
        num(p.circuit + p.fiber),
        num(r.q_final),
        num(r.F_final),
        std::to_string(r.assignment.pair_count()),
        num(min_of(r.residuals.c1)),
        num(min_of(r.residuals.c4)),
        std::to_string(r.match_rounds),
        std::to_string(r.assignments_searched),
        std::to_string(r.inner.flagged_powers),
        quote(r.error)};
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << "\n";
  }
  return os.str();
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("no CSV column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  return std::stod(rows.at(row).at(column(name)));
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false, any = false;
  auto end_record = [&] {
    fields.push_back(cur);
    cur.clear();
    if (t.header.empty()) {
      t.header = std::move(fields);
    } else {
      if (fields.size() != t.header.size())
        throw std::runtime_error("CSV row " + std::to_string(t.rows.size() + 1) +
                                 " has " + std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(t.header.size()));
      t.rows.push_back(std::move(fields));
    }
    fields.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
      any = true;
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      cur += c;
      any = true;
    }
  }
  if (quoted) throw std::runtime_error("CSV ends inside a quoted field");
  if (any || !cur.empty()) end_record();
  return t;
}

namespace {

json inner_json(const InnerStats& s) {
  return {{"rounds", s.rounds},
          {"flagged_powers", s.flagged_powers},
          {"fallback_powers", s.fallback_powers},
          {"flagged_bandwidths", s.flagged_bandwidths},
          {"monotone_violations", s.monotone_violations},
          {"budget_repairs", s.budget_repairs},
          {"rate_repairs", s.rate_repairs},
          {"solves", s.solves},
          {"unconverged", s.unconverged}};
}

json report_json(const SolveReport& r) {
  json j;
  j["scheme"] = r.scheme;
  j["seed"] = r.seed;
  j["converged"] = r.converged;
  j["approximate"] = r.approximate;
  j["feasible"] = r.feasible;
  j["rates_met"] = r.rates_met;
  j["iterations"] = r.iterations;
  j["eee"] = r.eee;
  j["q_final"] = r.q_final;
  j["F_final"] = r.F_final;
  j["total_ec"] = r.total_ec;
  j["user_ec"] = r.user_ec;
  j["user_ec_stderr"] = r.user_ec_stderr;
  const PowerBreakdown& p = r.power;
  j["power"] = {{"circuit", p.circuit},
                {"fiber", p.fiber},
                {"dynamic_native", p.dynamic_native},
                {"dynamic_borrowed", p.dynamic_borrowed},
                {"dynamic_mbs_serving", p.dynamic_mbs_serving},
                {"total", p.total}};
  json x = json::array();
  for (std::size_t z = 0; z < r.assignment.Z(); ++z) {
    json rowj = json::array();
    for (std::size_t m = 0; m < r.assignment.M(); ++m) rowj.push_back(r.assignment(z, m) ? 1 : 0);
    x.push_back(rowj);
  }
  j["assignment"] = x;
  j["allocation"] = {{"K", r.state.K}, {"M", r.state.M}, {"Z", r.state.Z},
                     {"p", r.state.p}, {"q", r.state.q}, {"w", r.state.w}, {"Q", r.state.Q}};
  json hist = json::array();
  for (const auto& s : r.history) {
    hist.push_back({{"iteration", s.iteration}, {"q", s.q}, {"F", s.F}, {"ec", s.ec},
                    {"power", s.power}, {"pairs", s.pairs}, {"kept_previous", s.kept_previous}});
  }
  j["history"] = hist;
  j["residuals"] = {{"c1", r.residuals.c1}, {"c2", r.residuals.c2},
                    {"c4", r.residuals.c4}, {"c8", r.residuals.c8}};
  j["inner"] = inner_json(r.inner);
  j["match_rounds"] = r.match_rounds;
  j["assignments_searched"] = r.assignments_searched;
  j["wall_time_s"] = r.wall_time_s;
  j["error"] = r.error;
  return j;
}

}  // namespace

std::string report_to_json(const SolveReport& r) { return report_json(r).dump(2) + "\n"; }

std::string sweep_to_json(const SweepSpec& spec, const ScenarioConfig& base,
                          const std::vector<SweepRow>& rows) {
  json doc;
  doc["sweep"] = {{"variable", spec.variable}, {"grid", spec.grid}, {"schemes", spec.schemes},
                  {"replications", spec.replications}, {"base_seed", spec.base_seed}};
  doc["base"] = {{"K", base.K}, {"M", base.M}, {"Z", base.Z}, {"num_samples", base.num_samples}};
  json runs = json::array();
  for (const auto& row : rows) {
    runs.push_back({{"variable", row.variable}, {"value", row.value}, {"scheme", row.scheme},
                    {"replication", row.replication}, {"seed", row.seed}, {"ok", row.ok},
                    {"report", report_json(row.report)}});
  }
  doc["runs"] = runs;
  return doc.dump(2) + "\n";
}

}  // namespace hcran
