#include "hcran/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hcran {

using json = nlohmann::json;

namespace {

json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const auto& item : node) out.push_back(yaml_to_json(item));
      return out;
    }
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return out;
    }
    case YAML::NodeType::Scalar: {
      const std::string s = node.Scalar();
      if (node.Tag() == "!") return s;  // quoted
      bool b;
      if (YAML::convert<bool>::decode(node, b) && s != "0" && s != "1") return b;
      long long i;
      if (YAML::convert<long long>::decode(node, i)) return i;
      double d;
      if (YAML::convert<double>::decode(node, d)) return d;
      return s;
    }
  }
  return nullptr;
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw std::runtime_error("scenario key '" + key + "': " + what);
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail(key, "expected an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

// Scalars are kept as a single entry and broadcast by conform_sizes.
std::vector<double> as_list(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) fail(key, "expected a number or a nonempty list");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_double(e, key));
  return out;
}

void check_keys(const json& section, const std::string& name,
                const std::set<std::string>& allowed) {
  if (!section.is_object()) fail(name, "expected a mapping");
  for (const auto& [k, _] : section.items()) {
    if (!allowed.count(k)) fail(name + "." + k, "unknown key");
  }
}

ScenarioFile from_json(const json& doc) {
  if (!doc.is_object()) throw std::runtime_error("scenario document must be a mapping");
  check_keys(doc, "<root>", {"topology", "spectrum", "qos", "power", "simulation", "solver"});
  ScenarioFile out;
  ScenarioConfig& c = out.cfg;
  // Lists given explicitly are kept; the rest are rebuilt for the final sizes.
  c.W_z.clear();
  c.theta.clear();
  c.P_max.clear();
  c.zeta.clear();
  c.P_c.clear();
  c.P_f.clear();
  c.R_fronthaul.clear();
  c.R_mbs.clear();
  bool have_noise_dbm = false, have_N0 = false;
  double noise_dbm = -102.0;

  if (doc.contains("topology")) {
    const json& s = doc["topology"];
    check_keys(s, "topology", {"K", "M", "Z", "cell_radius", "d0", "pathloss_exponent"});
    if (s.contains("K")) c.K = as_count(s["K"], "topology.K");
    if (s.contains("M")) c.M = as_count(s["M"], "topology.M");
    if (s.contains("Z")) c.Z = as_count(s["Z"], "topology.Z");
    if (s.contains("cell_radius")) c.cell_radius = as_double(s["cell_radius"], "topology.cell_radius");
    if (s.contains("d0")) c.d0 = as_double(s["d0"], "topology.d0");
    if (s.contains("pathloss_exponent"))
      c.pathloss_exponent = as_double(s["pathloss_exponent"], "topology.pathloss_exponent");
  }
  if (doc.contains("spectrum")) {
    const json& s = doc["spectrum"];
    check_keys(s, "spectrum", {"B", "W_mc", "W_z", "T_f", "N0", "noise_dbm"});
    if (s.contains("B")) c.B = as_double(s["B"], "spectrum.B");
    if (s.contains("W_mc")) c.W_mc = as_double(s["W_mc"], "spectrum.W_mc");
    if (s.contains("W_z")) c.W_z = as_list(s["W_z"], "spectrum.W_z");
    if (s.contains("T_f")) c.T_f = as_double(s["T_f"], "spectrum.T_f");
    if (s.contains("N0")) {
      c.N0 = as_double(s["N0"], "spectrum.N0");
      have_N0 = true;
    }
    if (s.contains("noise_dbm")) {
      noise_dbm = as_double(s["noise_dbm"], "spectrum.noise_dbm");
      have_noise_dbm = true;
    }
  }
  if (have_N0 && have_noise_dbm) fail("spectrum", "give N0 or noise_dbm, not both");
  if (have_noise_dbm) c.N0 = noise_psd_from_dbm(noise_dbm, c.B);
  if (doc.contains("qos")) {
    const json& s = doc["qos"];
    check_keys(s, "qos", {"theta", "R_fronthaul", "R_mbs"});
    if (s.contains("theta")) c.theta = as_list(s["theta"], "qos.theta");
    if (s.contains("R_fronthaul")) c.R_fronthaul = as_list(s["R_fronthaul"], "qos.R_fronthaul");
    if (s.contains("R_mbs")) c.R_mbs = as_list(s["R_mbs"], "qos.R_mbs");
  }
  if (doc.contains("power")) {
    const json& s = doc["power"];
    check_keys(s, "power", {"P_max", "zeta", "zeta_is_efficiency", "P_c", "P_f"});
    if (s.contains("P_max")) c.P_max = as_list(s["P_max"], "power.P_max");
    if (s.contains("zeta")) c.zeta = as_list(s["zeta"], "power.zeta");
    if (s.contains("zeta_is_efficiency"))
      c.zeta_is_efficiency = as_bool(s["zeta_is_efficiency"], "power.zeta_is_efficiency");
    if (s.contains("P_c")) c.P_c = as_list(s["P_c"], "power.P_c");
    if (s.contains("P_f")) c.P_f = as_list(s["P_f"], "power.P_f");
  }
  if (doc.contains("simulation")) {
    const json& s = doc["simulation"];
    check_keys(s, "simulation", {"seed", "num_samples"});
    if (s.contains("seed")) c.seed = as_count(s["seed"], "simulation.seed");
    if (s.contains("num_samples")) c.num_samples = as_count(s["num_samples"], "simulation.num_samples");
  }
  // A single entry broadcasts; a list of the wrong length is left for validate_config.
  auto broadcast = [](std::vector<double>& v, std::size_t n) {
    if (v.size() == 1 && n != 1) v.assign(n, v.front());
  };
  broadcast(c.W_z, c.Z);
  broadcast(c.R_mbs, c.Z);
  broadcast(c.theta, c.K);
  for (auto* v : {&c.P_max, &c.zeta, &c.P_c, &c.P_f, &c.R_fronthaul}) broadcast(*v, c.M);
  // Missing lists take defaults.
  ScenarioConfig d = default_config(c.K, c.M, c.Z);
  for (auto [dst, src] : {std::pair{&c.W_z, &d.W_z}, {&c.R_mbs, &d.R_mbs}, {&c.theta, &d.theta},
                          {&c.P_max, &d.P_max}, {&c.zeta, &d.zeta}, {&c.P_c, &d.P_c},
                          {&c.P_f, &d.P_f}, {&c.R_fronthaul, &d.R_fronthaul}}) {
    if (dst->empty()) *dst = *src;
  }

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    SolverSettings& st = out.settings;
    check_keys(s, "solver",
               {"max_inner_iters", "min_inner_iters", "inner_tol", "beta1", "beta2", "beta3",
                "omega_bisection", "eps_excl", "newton_tol", "newton_max_iter",
                "numeric_fallback", "rate_repair", "stall_rounds", "max_outer_iters", "dinkelbach_eps", "max_exhaustive"});
    if (s.contains("max_inner_iters")) st.max_inner_iters = as_int(s["max_inner_iters"], "solver.max_inner_iters");
    if (s.contains("min_inner_iters")) st.min_inner_iters = as_int(s["min_inner_iters"], "solver.min_inner_iters");
    if (s.contains("inner_tol")) st.inner_tol = as_double(s["inner_tol"], "solver.inner_tol");
    if (s.contains("beta1")) st.beta1 = as_double(s["beta1"], "solver.beta1");
    if (s.contains("beta2")) st.beta2 = as_double(s["beta2"], "solver.beta2");
    if (s.contains("beta3")) st.beta3 = as_double(s["beta3"], "solver.beta3");
    if (s.contains("omega_bisection")) st.omega_bisection = as_bool(s["omega_bisection"], "solver.omega_bisection");
    if (s.contains("eps_excl")) st.eps_excl = as_double(s["eps_excl"], "solver.eps_excl");
    if (s.contains("newton_tol")) st.newton_tol = as_double(s["newton_tol"], "solver.newton_tol");
    if (s.contains("newton_max_iter")) st.newton_max_iter = as_int(s["newton_max_iter"], "solver.newton_max_iter");
    if (s.contains("numeric_fallback")) st.numeric_fallback = as_bool(s["numeric_fallback"], "solver.numeric_fallback");
    if (s.contains("rate_repair")) st.rate_repair = as_bool(s["rate_repair"], "solver.rate_repair");
    if (s.contains("stall_rounds")) st.stall_rounds = as_int(s["stall_rounds"], "solver.stall_rounds");
    if (s.contains("max_outer_iters")) st.max_outer_iters = as_int(s["max_outer_iters"], "solver.max_outer_iters");
    if (s.contains("dinkelbach_eps")) st.dinkelbach_eps = as_double(s["dinkelbach_eps"], "solver.dinkelbach_eps");
    if (s.contains("max_exhaustive")) st.max_exhaustive = as_count(s["max_exhaustive"], "solver.max_exhaustive");
  }
  return out;
}

json to_json(const ScenarioConfig& c, const SolverSettings& s) {
  json doc;
  doc["topology"] = {{"K", c.K}, {"M", c.M}, {"Z", c.Z}, {"cell_radius", c.cell_radius},
                     {"d0", c.d0}, {"pathloss_exponent", c.pathloss_exponent}};
  doc["spectrum"] = {{"B", c.B}, {"W_mc", c.W_mc}, {"W_z", c.W_z}, {"T_f", c.T_f}, {"N0", c.N0}};
  doc["qos"] = {{"theta", c.theta}, {"R_fronthaul", c.R_fronthaul}, {"R_mbs", c.R_mbs}};
  doc["power"] = {{"P_max", c.P_max}, {"zeta", c.zeta}, {"zeta_is_efficiency", c.zeta_is_efficiency},
                  {"P_c", c.P_c}, {"P_f", c.P_f}};
  doc["simulation"] = {{"seed", c.seed}, {"num_samples", c.num_samples}};
  doc["solver"] = {{"max_inner_iters", s.max_inner_iters}, {"min_inner_iters", s.min_inner_iters},
                   {"inner_tol", s.inner_tol}, {"beta1", s.beta1}, {"beta2", s.beta2},
                   {"beta3", s.beta3}, {"omega_bisection", s.omega_bisection},
                   {"eps_excl", s.eps_excl}, {"newton_tol", s.newton_tol},
                   {"newton_max_iter", s.newton_max_iter}, {"numeric_fallback", s.numeric_fallback},
                   {"rate_repair", s.rate_repair}, {"stall_rounds", s.stall_rounds},
                   {"max_outer_iters", s.max_outer_iters}, {"dinkelbach_eps", s.dinkelbach_eps},
                   {"max_exhaustive", s.max_exhaustive}};
  return doc;
}

void emit(YAML::Emitter& out, const json& v) {
  if (v.is_object()) {
    out << YAML::BeginMap;
    for (const auto& [k, e] : v.items()) {
      out << YAML::Key << k << YAML::Value;
      emit(out, e);
    }
    out << YAML::EndMap;
  } else if (v.is_array()) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& e : v) emit(out, e);
    out << YAML::EndSeq;
  } else if (v.is_boolean()) {
    out << v.get<bool>();
  } else if (v.is_number_integer()) {
    out << v.get<long long>();
  } else if (v.is_number()) {
    out << YAML::Precision(17) << v.get<double>();
  } else {
    out << v.get<std::string>();
  }
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text, const std::string& format) {
  json doc;
  if (format == "json") {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(std::string("invalid JSON: ") + e.what());
    }
  } else if (format == "yaml") {
    try {
      doc = yaml_to_json(YAML::Load(text));
    } catch (const YAML::Exception& e) {
      throw std::runtime_error(std::string("invalid YAML: ") + e.what());
    }
  } else {
    throw std::invalid_argument("unknown scenario format '" + format + "'");
  }
  if (doc.is_null()) doc = json::object();
  return from_json(doc);
}

ScenarioFile load_scenario(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  try {
    return parse_scenario(read_text_file(path), ext == ".json" ? "json" : "yaml");
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string scenario_to_json(const ScenarioConfig& cfg, const SolverSettings& settings) {
  return to_json(cfg, settings).dump(2) + "\n";
}

std::string scenario_to_yaml(const ScenarioConfig& cfg, const SolverSettings& settings) {
  YAML::Emitter out;
  emit(out, to_json(cfg, settings));
  return std::string(out.c_str()) + "\n";
}

namespace {

json parse_doc(const std::string& text, const std::string& format) {
  if (format == "json") {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(std::string("invalid JSON: ") + e.what());
    }
  }
  if (format == "yaml") {
    try {
      return yaml_to_json(YAML::Load(text));
    } catch (const YAML::Exception& e) {
      throw std::runtime_error(std::string("invalid YAML: ") + e.what());
    }
  }
  throw std::invalid_argument("unknown document format '" + format + "'");
}

std::string format_of(const std::string& path) {
  return std::filesystem::path(path).extension().string() == ".json" ? "json" : "yaml";
}

}  // namespace

SweepFile parse_sweep(const std::string& text, const std::string& format,
                      const std::string& base_dir) {
  const json doc = parse_doc(text, format);
  if (!doc.is_object()) throw std::runtime_error("sweep document must be a mapping");
  check_keys(doc, "<root>", {"sweep", "scenario"});
  if (!doc.contains("sweep")) fail("sweep", "missing section");
  SweepFile out;
  const json& s = doc["sweep"];
  check_keys(s, "sweep", {"variable", "grid", "schemes", "replications", "base_seed"});
  SweepSpec& spec = out.spec;
  if (s.contains("variable")) {
    if (!s["variable"].is_string()) fail("sweep.variable", "expected a string");
    spec.variable = s["variable"].get<std::string>();
  }
  if (!s.contains("grid")) fail("sweep.grid", "missing");
  spec.grid = as_list(s["grid"], "sweep.grid");
  if (s.contains("schemes")) {
    spec.schemes.clear();
    const json& v = s["schemes"];
    if (v.is_string()) {
      spec.schemes.push_back(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_string()) fail("sweep.schemes", "expected scheme names");
        spec.schemes.push_back(e.get<std::string>());
      }
    } else {
      fail("sweep.schemes", "expected a name or a list of names");
    }
  }
  if (s.contains("replications")) spec.replications = as_count(s["replications"], "sweep.replications");
  if (s.contains("base_seed")) spec.base_seed = as_count(s["base_seed"], "sweep.base_seed");
  const auto bad = validate_sweep(spec);
  if (!bad.empty()) fail("sweep", bad.front());

  if (doc.contains("scenario")) {
    const json& sc = doc["scenario"];
    if (sc.is_string()) {
      std::filesystem::path p(sc.get<std::string>());
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      out.base = load_scenario(p.string());
    } else {
      out.base = from_json(sc);
    }
  } else {
    out.base = from_json(json::object());
  }
  return out;
}

SweepFile load_sweep(const std::string& path) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  try {
    return parse_sweep(read_text_file(path), format_of(path), dir.empty() ? "." : dir);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace hcran
