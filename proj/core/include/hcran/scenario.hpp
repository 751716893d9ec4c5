#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hcran {

using Rng = std::mt19937_64;

/// Static description of one H-CRAN instance.
///
/// Units: bandwidths in Hz, powers in W, durations in seconds. All rate
/// targets are bits per frame (rate in bit/s times the frame duration), and
/// the delay-QoS exponents are per bit of a frame's payload.
struct ScenarioConfig {
  std::size_t M = 2;  ///< RRHs
  std::size_t Z = 2;  ///< MBS users
  std::size_t K = 3;  ///< RRH users

  double B = 700e3;      ///< per-RRH bandwidth
  double W_mc = 550e3;   ///< MBS bandwidth
  std::vector<double> W_z{200e3, 200e3};  ///< licensed band per MBS user
  double T_f = 1e-3;     ///< frame duration

  std::vector<double> theta{1e-5, 1e-5, 1e-5};  ///< delay-QoS exponent per user

  /// Noise power spectral density. The default spreads -102 dBm over B.
  double N0 = 9.013676349717062e-20;

  std::vector<double> P_max{1.0, 1.0};
  std::vector<double> zeta{0.16, 0.16};
  std::vector<double> P_c{0.01, 0.01};
  std::vector<double> P_f{1.0, 1.0};
  std::vector<double> R_fronthaul{1000.0, 1000.0};  ///< C1 target, bits/frame
  std::vector<double> R_mbs{700.0, 700.0};          ///< C2 target, bits/frame

  /// When true, `zeta` holds a drain efficiency and the power-model weight is
  /// its reciprocal. The default keeps the number as a reciprocal efficiency.
  bool zeta_is_efficiency = false;

  double pathloss_exponent = 2.5;
  double d0 = 1.0;
  double cell_radius = 500.0;

  std::uint64_t seed = 1;
  std::size_t num_samples = 1000;

  /// Weight applied to radiated power in the power model.
  [[nodiscard]] double power_weight(std::size_t m) const {
    return zeta_is_efficiency ? 1.0 / zeta.at(m) : zeta.at(m);
  }
};

/// Total noise power in dBm spread evenly over `bandwidth_hz`, in W/Hz.
double noise_psd_from_dbm(double noise_dbm, double bandwidth_hz);

/// Paper-default parameters for the given sizes (every per-entity vector is
/// filled with the default value).
ScenarioConfig default_config(std::size_t K = 3, std::size_t M = 2,
                              std::size_t Z = 2);

/// Resize every per-entity vector to match K, M and Z, filling new slots with
/// the first existing value (or the paper default when empty).
void conform_sizes(ScenarioConfig& cfg);

struct Violation {
  std::string field;
  std::string rule;
};

std::vector<Violation> validate_config(const ScenarioConfig& cfg);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

/// MBS at the origin; everything else placed uniformly in the cell disc.
struct Topology {
  Point mbs{};
  std::vector<Point> rrhs;
  std::vector<Point> users;      ///< RRH users, size K
  std::vector<Point> mbs_users;  ///< size Z
};

Topology sample_topology(const ScenarioConfig& cfg, Rng& rng);

/// N fading states of the three gain families, stored flat.
class ChannelSampleSet {
 public:
  ChannelSampleSet() = default;
  ChannelSampleSet(std::size_t N, std::size_t K, std::size_t M, std::size_t Z);

  std::size_t N() const { return N_; }
  std::size_t K() const { return K_; }
  std::size_t M() const { return M_; }
  std::size_t Z() const { return Z_; }

  /// RRH m -> user k on the RRH's own band.
  double& g(std::size_t n, std::size_t k, std::size_t m) {
    return g_[(n * K_ + k) * M_ + m];
  }
  double g(std::size_t n, std::size_t k, std::size_t m) const {
    return g_[(n * K_ + k) * M_ + m];
  }
  /// RRH m -> user k on the band borrowed from MBS user z.
  double& h(std::size_t n, std::size_t k, std::size_t m, std::size_t z) {
    return h_[((n * K_ + k) * M_ + m) * Z_ + z];
  }
  double h(std::size_t n, std::size_t k, std::size_t m, std::size_t z) const {
    return h_[((n * K_ + k) * M_ + m) * Z_ + z];
  }
  /// RRH m -> MBS user z.
  double& H(std::size_t n, std::size_t m, std::size_t z) {
    return H_[(n * M_ + m) * Z_ + z];
  }
  double H(std::size_t n, std::size_t m, std::size_t z) const {
    return H_[(n * M_ + m) * Z_ + z];
  }

  double mean_g(std::size_t k, std::size_t m) const;
  double mean_h(std::size_t k, std::size_t m, std::size_t z) const;

  /// All N samples of H for one (m, z).
  std::vector<double> H_samples(std::size_t m, std::size_t z) const;

  bool operator==(const ChannelSampleSet&) const = default;

 private:
  std::size_t N_ = 0, K_ = 0, M_ = 0, Z_ = 0;
  std::vector<double> g_, h_, H_;
};

/// Rayleigh block fading times distance path loss: |alpha|^2 (d0/d)^eta with
/// |alpha|^2 unit-mean exponential, independent across every index.
ChannelSampleSet sample_channels(const ScenarioConfig& cfg, const Topology& topo,
                                 std::size_t N, Rng& rng);

/// Path-loss factor (d0 / max(d, d0))^eta.
double pathloss(double d, double d0, double exponent);

/// Topology and channels drawn from `cfg.seed` with `cfg.num_samples` states.
struct ScenarioInstance {
  ScenarioConfig cfg;
  Topology topology;
  ChannelSampleSet samples;
};

ScenarioInstance instantiate(const ScenarioConfig& cfg);

}  // namespace hcran
