#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hcran/scenario.hpp"

namespace hcran {

/// One shared NOMA band: the RRH's own band B, or the part b = W_z - w of an
/// MBS user's licensed band. Holds N x K gains plus the per-sample SIC order,
/// so SINRs for a power vector cost O(N K).
///
/// Interference follows the convention of the SINR model used throughout:
/// user k is interfered by every user decoded after it (weaker gain, ties
/// broken towards the higher index), and the interference is scaled by k's
/// own gain.
class BandChannel {
 public:
  BandChannel() = default;
  BandChannel(std::size_t N, std::size_t K, std::vector<double> gains,
              double bandwidth, double N0, double T_f);

  static BandChannel native(const ChannelSampleSet& s, const ScenarioConfig& cfg,
                            std::size_t m);
  static BandChannel borrowed(const ChannelSampleSet& s,
                              const ScenarioConfig& cfg, std::size_t m,
                              std::size_t z, double bandwidth);

  std::size_t N() const { return N_; }
  std::size_t K() const { return K_; }
  double bandwidth() const { return bandwidth_; }
  double noise() const { return bandwidth_ * N0_; }
  double N0() const { return N0_; }
  double T_f() const { return T_f_; }
  void set_bandwidth(double b) { bandwidth_ = b; }

  double gain(std::size_t n, std::size_t k) const { return gain_[n * K_ + k]; }
  std::uint32_t user_at(std::size_t n, std::size_t r) const { return order_[n * K_ + r]; }
  std::uint32_t rank_of(std::size_t n, std::size_t k) const { return rank_[n * K_ + k]; }

  /// Sum of the powers of users decoded after k in state n (the interferer
  /// set), for every (n, k). `out` has N*K entries.
  void interferer_power(std::span<const double> powers, std::span<double> out) const;

  double sinr(std::size_t n, std::size_t k, std::span<const double> powers) const;
  /// Per-sample achievable rate of user k, bits/frame.
  void rates(std::size_t k, std::span<const double> powers, std::span<double> out) const;

 private:
  std::size_t N_ = 0, K_ = 0;
  double bandwidth_ = 0.0, N0_ = 0.0, T_f_ = 0.0;
  std::vector<double> gain_;
  std::vector<std::uint32_t> order_, rank_;
};

/// Per-user data entering the SCA-bounded effective capacity on one band.
struct BandTerms {
  std::vector<double> slope;      ///< alpha (native) or kappa (borrowed)
  std::vector<double> intercept;  ///< beta or xi
  std::vector<double> theta;
  std::vector<double> weight;     ///< 1 + mu_k
};

/// SCA-bounded effective capacity of user k on the band:
///   -(1/theta) ln mean_n exp(-theta bw T_f (slope log2 sinr_n + intercept)).
double surrogate_ec(const BandChannel& band, std::size_t k,
                    std::span<const double> powers, const BandTerms& terms);

/// sum_k weight_k surrogate_ec_k - sum_k price_k p_k.
double band_lagrangian(const BandChannel& band, std::span<const double> powers,
                       const BandTerms& terms, std::span<const double> prices);

/// Marginal interference cost of user j: the derivative of
/// -sum_{k != j} weight_k surrogate_ec_k with respect to p_j.
double interference_price(const BandChannel& band, std::size_t j,
                          std::span<const double> powers, const BandTerms& terms);

/// Result of the per-user closed-form power update.
struct PowerUpdate {
  double power = 0.0;
  bool clipped = false;   ///< interior stationary point lies above the cap
  bool boundary = false;  ///< no positive price: the Lagrangian grows up to the cap
  bool zero = false;      ///< user has no SCA slope; power forced to 0
  /// Quantities of the closed-form expression at the returned power, kept
  /// as natural logs because Theta and delta underflow for strict QoS.
  double log_Theta = 0.0;
  double log_Gamma = 0.0;
  double log_delta = 0.0;
  double sigma = 0.0;
  double own_marginal = 0.0;    ///< A = weight bw T_f slope / ln 2
  double interference = 0.0;    ///< pi_j at the returned power
  int evaluations = 0;

  bool flagged() const { return clipped || boundary; }
};

/// Closed-form stationary power of user j for price `price` (q zeta + omega +
/// exclusivity term), holding every other user's power fixed. The result
/// satisfies A = p (price + pi_j(p)); equivalently the exponential form
///   p = exp[(ln Theta + sigma (slope log2 Gamma + intercept)) / (-1 - sigma slope / ln 2)]
/// with Gamma the certainty-equivalent interference-normalised gain and
/// delta the sample mean of the exponential EC kernel at p.
PowerUpdate closed_form_power(const BandChannel& band, std::size_t j,
                              std::span<const double> powers,
                              const BandTerms& terms, double price, double cap);

/// Evaluates the exponential form above from ln Theta and ln Gamma.
double exponential_form_power(double log_Theta, double log_Gamma, double sigma,
                              double slope, double intercept);

/// Per-coordinate Lagrangian maximised by golden-section search over
/// [0, cap]; used when the closed form is flagged.
double numeric_power(const BandChannel& band, std::size_t j,
                     std::span<const double> powers, const BandTerms& terms,
                     double price, double cap);

}  // namespace hcran
