#include "hcran/scenario.hpp"

#include <algorithm>
#include <stdexcept>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hcran {

double noise_psd_from_dbm(double noise_dbm, double bandwidth_hz) {
  const double watts = std::pow(10.0, (noise_dbm - 30.0) / 10.0);
  return watts / bandwidth_hz;
}

ScenarioConfig default_config(std::size_t K, std::size_t M, std::size_t Z) {
  ScenarioConfig cfg;
  cfg.K = K;
  cfg.M = M;
  cfg.Z = Z;
  cfg.N0 = noise_psd_from_dbm(-102.0, cfg.B);
  cfg.W_z.clear();
  cfg.theta.clear();
  cfg.P_max.clear();
  cfg.zeta.clear();
  cfg.P_c.clear();
  cfg.P_f.clear();
  cfg.R_fronthaul.clear();
  cfg.R_mbs.clear();
  conform_sizes(cfg);
  return cfg;
}

namespace {

void fit(std::vector<double>& v, std::size_t n, double fallback) {
  const double fill = v.empty() ? fallback : v.front();
  v.resize(n, fill);
}

}  // namespace

void conform_sizes(ScenarioConfig& cfg) {
  fit(cfg.W_z, cfg.Z, 200e3);
  fit(cfg.R_mbs, cfg.Z, 700.0);
  fit(cfg.theta, cfg.K, 1e-5);
  fit(cfg.P_max, cfg.M, 1.0);
  fit(cfg.zeta, cfg.M, 0.16);
  fit(cfg.P_c, cfg.M, 0.01);
  fit(cfg.P_f, cfg.M, 1.0);
  fit(cfg.R_fronthaul, cfg.M, 1000.0);
}

std::vector<Violation> validate_config(const ScenarioConfig& cfg) {
  std::vector<Violation> out;
  auto add = [&](std::string field, std::string rule) {
    out.push_back({std::move(field), std::move(rule)});
  };
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) add(name, "must be finite and > 0");
  };
  auto sized = [&](const char* name, const std::vector<double>& v,
                   std::size_t n, const char* count) {
    if (v.size() != n) {
      std::ostringstream os;
      os << "length " << v.size() << " does not match " << count << " = " << n;
      add(name, os.str());
      return false;
    }
    return true;
  };

  positive("B", cfg.B);
  positive("W_mc", cfg.W_mc);
  positive("T_f", cfg.T_f);
  positive("N0", cfg.N0);
  positive("d0", cfg.d0);
  positive("cell_radius", cfg.cell_radius);
  positive("pathloss_exponent", cfg.pathloss_exponent);
  if (cfg.num_samples < 1) add("num_samples", "must be >= 1");
  if (cfg.cell_radius <= cfg.d0) add("cell_radius", "must exceed d0");

  if (sized("W_z", cfg.W_z, cfg.Z, "Z")) {
    double total = 0.0;
    for (double w : cfg.W_z) {
      if (!(w > 0.0)) {
        add("W_z", "every licensed bandwidth must be > 0");
        break;
      }
    }
    for (double w : cfg.W_z) total += w;
    if (total > cfg.W_mc) add("W_z", "sum over z of W_z must not exceed W_mc");
  }
  if (sized("theta", cfg.theta, cfg.K, "K")) {
    for (double t : cfg.theta) {
      if (!(t > 0.0) || !std::isfinite(t)) {
        add("theta", "every delay-QoS exponent must be > 0");
        break;
      }
    }
  }
  auto all_positive = [&](const char* name, const std::vector<double>& v,
                          std::size_t n, const char* count) {
    if (!sized(name, v, n, count)) return;
    for (double x : v) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        add(name, "every entry must be finite and > 0");
        return;
      }
    }
  };
  auto all_nonneg = [&](const char* name, const std::vector<double>& v,
                        std::size_t n, const char* count) {
    if (!sized(name, v, n, count)) return;
    for (double x : v) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        add(name, "every entry must be finite and >= 0");
        return;
      }
    }
  };
  all_positive("P_max", cfg.P_max, cfg.M, "M");
  all_positive("P_c", cfg.P_c, cfg.M, "M");
  all_positive("P_f", cfg.P_f, cfg.M, "M");
  all_nonneg("R_fronthaul", cfg.R_fronthaul, cfg.M, "M");
  all_nonneg("R_mbs", cfg.R_mbs, cfg.Z, "Z");
  if (cfg.zeta_is_efficiency) {
    all_positive("zeta", cfg.zeta, cfg.M, "M");
  } else {
    all_nonneg("zeta", cfg.zeta, cfg.M, "M");
  }
  return out;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double pathloss(double d, double d0, double exponent) {
  return std::pow(d0 / std::max(d, d0), exponent);
}

namespace {

Point uniform_in_disc(double radius, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double phi = 2.0 * std::numbers::pi * u(rng);
  return {r * std::cos(phi), r * std::sin(phi)};
}

// Rejection-samples a point at least d0 from every transmitter.
Point place_receiver(const ScenarioConfig& cfg, const Topology& topo,
                     Rng& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Point p = uniform_in_disc(cfg.cell_radius, rng);
    bool ok = distance(p, topo.mbs) >= cfg.d0;
    for (const Point& r : topo.rrhs) ok = ok && distance(p, r) >= cfg.d0;
    if (ok) return p;
  }
  throw std::runtime_error("sample_topology: cannot keep receivers d0 away");
}

}  // namespace

Topology sample_topology(const ScenarioConfig& cfg, Rng& rng) {
  Topology topo;
  topo.rrhs.reserve(cfg.M);
  for (std::size_t m = 0; m < cfg.M; ++m) {
    Point p = uniform_in_disc(cfg.cell_radius, rng);
    while (distance(p, topo.mbs) < cfg.d0) p = uniform_in_disc(cfg.cell_radius, rng);
    topo.rrhs.push_back(p);
  }
  topo.users.reserve(cfg.K);
  for (std::size_t k = 0; k < cfg.K; ++k) {
    topo.users.push_back(place_receiver(cfg, topo, rng));
  }
  topo.mbs_users.reserve(cfg.Z);
  for (std::size_t z = 0; z < cfg.Z; ++z) {
    topo.mbs_users.push_back(place_receiver(cfg, topo, rng));
  }
  return topo;
}

ChannelSampleSet::ChannelSampleSet(std::size_t N, std::size_t K, std::size_t M,
                                   std::size_t Z)
    : N_(N), K_(K), M_(M), Z_(Z),
      g_(N * K * M, 0.0), h_(N * K * M * Z, 0.0), H_(N * M * Z, 0.0) {}

double ChannelSampleSet::mean_g(std::size_t k, std::size_t m) const {
  double s = 0.0;
  for (std::size_t n = 0; n < N_; ++n) s += g(n, k, m);
  return s / static_cast<double>(N_);
}

double ChannelSampleSet::mean_h(std::size_t k, std::size_t m,
                                std::size_t z) const {
  double s = 0.0;
  for (std::size_t n = 0; n < N_; ++n) s += h(n, k, m, z);
  return s / static_cast<double>(N_);
}

std::vector<double> ChannelSampleSet::H_samples(std::size_t m,
                                                std::size_t z) const {
  std::vector<double> out(N_);
  for (std::size_t n = 0; n < N_; ++n) out[n] = H(n, m, z);
  return out;
}

ChannelSampleSet sample_channels(const ScenarioConfig& cfg,
                                 const Topology& topo, std::size_t N,
                                 Rng& rng) {
  if (N < 1) throw std::invalid_argument("sample_channels: N must be >= 1");
  const std::size_t K = topo.users.size();
  const std::size_t M = topo.rrhs.size();
  const std::size_t Z = topo.mbs_users.size();
  std::vector<double> pl_user(K * M), pl_mbs(M * Z);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t m = 0; m < M; ++m)
      pl_user[k * M + m] = pathloss(distance(topo.users[k], topo.rrhs[m]),
                                    cfg.d0, cfg.pathloss_exponent);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t z = 0; z < Z; ++z)
      pl_mbs[m * Z + z] = pathloss(distance(topo.mbs_users[z], topo.rrhs[m]),
                                   cfg.d0, cfg.pathloss_exponent);

  // |alpha|^2 for a unit-power circular Gaussian alpha is Exp(1).
  std::exponential_distribution<double> fade(1.0);
  auto draw = [&] {
    double v = fade(rng);
    while (!(v > 0.0)) v = fade(rng);
    return v;
  };

  ChannelSampleSet s(N, K, M, Z);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t m = 0; m < M; ++m) s.g(n, k, m) = draw() * pl_user[k * M + m];
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t m = 0; m < M; ++m)
        for (std::size_t z = 0; z < Z; ++z)
          s.h(n, k, m, z) = draw() * pl_user[k * M + m];
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t z = 0; z < Z; ++z) s.H(n, m, z) = draw() * pl_mbs[m * Z + z];
  }
  return s;
}

ScenarioInstance instantiate(const ScenarioConfig& cfg) {
  ScenarioInstance inst;
  inst.cfg = cfg;
  Rng rng(cfg.seed);
  inst.topology = sample_topology(cfg, rng);
  inst.samples = sample_channels(cfg, inst.topology, cfg.num_samples, rng);
  return inst;
}

}  // namespace hcran
