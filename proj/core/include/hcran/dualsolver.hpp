#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hcran/band.hpp"
#include "hcran/effcap.hpp"
#include "hcran/sca.hpp"
#include "hcran/scenario.hpp"
#include "hcran/state.hpp"

namespace hcran {

inline constexpr std::size_t kNoPair = std::numeric_limits<std::size_t>::max();

struct DualMultipliers {
  std::size_t K = 0, M = 0, Z = 0;
  std::vector<double> mu;     ///< K x M, rate target
  std::vector<double> omega;  ///< M, power budget
  std::vector<double> varpi;  ///< K x M x M, single-RRH penalty

  DualMultipliers() = default;
  DualMultipliers(std::size_t K_, std::size_t M_, std::size_t Z_)
      : K(K_), M(M_), Z(Z_), mu(K_ * M_, 0.0), omega(M_, 0.0),
        varpi(K_ * M_ * M_, 0.0) {}

  double& mu_at(std::size_t k, std::size_t m) { return mu[k * M + m]; }
  double mu_at(std::size_t k, std::size_t m) const { return mu[k * M + m]; }
  double& varpi_at(std::size_t k, std::size_t m, std::size_t m2) {
    return varpi[(k * M + m) * M + m2];
  }
  double varpi_at(std::size_t k, std::size_t m, std::size_t m2) const {
    return varpi[(k * M + m) * M + m2];
  }

  bool operator==(const DualMultipliers&) const = default;
};

struct SolverSettings {
  int max_inner_iters = 200;
  int min_inner_iters = 3;
  double inner_tol = 1e-5;    ///< relative change of the objective
  double beta1 = 0.05;        ///< rate-target multiplier step
  double beta2 = 1e-3;        ///< budget multiplier step (subgradient mode)
  double beta3 = 1e-3;        ///< exclusivity multiplier step
  bool omega_bisection = true;
  double eps_excl = 1e-4;
  double newton_tol = 1e-9;   ///< residual, relative to the marginal scale
  int newton_max_iter = 60;
  bool numeric_fallback = true;
  bool rate_repair = true;    ///< lift users short of R to the target
  int stall_rounds = 20;      ///< stop after this many rounds without a better round

  int max_outer_iters = 30;
  double dinkelbach_eps = 1e-3;
  std::size_t max_exhaustive = 4;

  void validate() const;
};

/// Channels, user association and cached statistics shared by every solve on
/// one sample set. Users are associated with exactly one RRH, so the
/// single-RRH constraint holds by construction.
class Problem {
 public:
  Problem(const ScenarioConfig& cfg, const ChannelSampleSet& samples);

  const ScenarioConfig& cfg() const { return cfg_; }
  const ChannelSampleSet& samples() const { return samples_; }
  std::size_t K() const { return cfg_.K; }
  std::size_t M() const { return cfg_.M; }
  std::size_t Z() const { return cfg_.Z; }

  const BandChannel& native(std::size_t m) const { return native_[m]; }
  /// Borrowed band of pair (m, z) at full width W_z.
  const BandChannel& borrowed(std::size_t m, std::size_t z) const {
    return borrowed_[m * Z() + z];
  }
  double mean_N0_over_H(std::size_t m, std::size_t z) const {
    return n0_over_H_[m * Z() + z];
  }
  double mean_g(std::size_t k, std::size_t m) const { return mean_g_[k * M() + m]; }
  double mean_h(std::size_t k, std::size_t m, std::size_t z) const {
    return mean_h_[(k * M() + m) * Z() + z];
  }

  std::size_t serving_rrh(std::size_t k) const { return serving_[k]; }
  const std::vector<std::size_t>& users_of(std::size_t m) const { return users_[m]; }
  void set_association(const std::vector<std::size_t>& serving);

  /// Power serving MBS user z from RRH m at bandwidth w.
  double mbs_power(std::size_t m, std::size_t z, double w) const;

 private:
  ScenarioConfig cfg_;
  ChannelSampleSet samples_;
  std::vector<BandChannel> native_, borrowed_;
  std::vector<double> n0_over_H_, mean_g_, mean_h_;
  std::vector<std::size_t> serving_;
  std::vector<std::vector<std::size_t>> users_;
};

/// Equal-split starting point for RRH m serving `pair` (or kNoPair), spending
/// `fraction` of the power budget.
void initialize_rrh(const Problem& pb, std::size_t m, std::size_t pair,
                    AllocationState& state, double fraction = 1.0);
AllocationState initial_state(const Problem& pb, const Assignment& x);

/// SCA constants at the sample-mean gains for the current powers.
ScaConstants expansion_constants(const Problem& pb, const AllocationState& state,
                                 const Assignment& x);

/// Band terms (slope, intercept, theta, 1 + mu) of RRH m's native band, or of
/// its borrowed band from z when z != kNoPair.
BandTerms band_terms(const Problem& pb, std::size_t m, std::size_t z,
                     const ScaConstants& sca, const DualMultipliers& mult);

/// Power price q zeta_m + omega_m + sum_m' varpi p_{k,m'} seen by user k.
double power_price(const Problem& pb, std::size_t k, std::size_t m,
                   const DualMultipliers& mult, const AllocationState& state,
                   double q);

PowerUpdate power_native_closed_form(std::size_t k, std::size_t m,
                                     const DualMultipliers& mult,
                                     const ScaConstants& sca,
                                     const AllocationState& state,
                                     const Problem& pb, double q);

PowerUpdate power_borrowed_closed_form(std::size_t k, std::size_t m, std::size_t z,
                                       const DualMultipliers& mult,
                                       const ScaConstants& sca,
                                       const AllocationState& state,
                                       const Problem& pb, double q);

struct BandwidthResult {
  double w = 0.0;
  double residual = 0.0;   ///< dL/dw at w
  double scale = 0.0;      ///< magnitude used to normalise the residual
  double lower = 0.0;      ///< smallest w that fits the remaining budget
  int iterations = 0;
  bool flagged = false;    ///< no sign change: boundary endpoint returned
  bool infeasible = false; ///< even w = W_z needs more than the budget
};

/// dL/dw of the bounded Lagrangian for pair (m, z) with powers fixed.
double bandwidth_residual(std::size_t m, std::size_t z, double w,
                          const DualMultipliers& mult, const ScaConstants& sca,
                          const AllocationState& state, const Problem& pb,
                          double q);

/// Bounded Lagrangian terms of pair (m, z) that depend on w.
double bandwidth_lagrangian(std::size_t m, std::size_t z, double w,
                            const DualMultipliers& mult, const ScaConstants& sca,
                            const AllocationState& state, const Problem& pb,
                            double q);

/// Newton with bisection safeguard on the stationarity residual over the
/// bandwidths that keep RRH m within its power budget.
BandwidthResult bandwidth_newton(std::size_t m, std::size_t z,
                                 const DualMultipliers& mult,
                                 const ScaConstants& sca,
                                 const AllocationState& state, const Problem& pb,
                                 double q, const SolverSettings& settings);

/// Exact per-user EC (native plus assigned borrowed bands), bits/frame.
std::vector<double> exact_user_ec(const Problem& pb, const AllocationState& state,
                                  const Assignment& x);

/// Projected subgradient step t >= 1 with step sizes beta_i / sqrt(t):
///   mu    <- [mu - b1 (E_k - R_m)]^+        on the serving RRH
///   omega <- [omega + b2 (usage_m - P_max)]^+
///   varpi <- [varpi + b3 p_{k,m} p_{k,m'}]^+
DualMultipliers update_multipliers(std::size_t t, const DualMultipliers& mult,
                                   const AllocationState& state,
                                   const Assignment& x,
                                   std::span<const double> user_ec,
                                   const Problem& pb,
                                   const SolverSettings& settings);

struct InnerTrace {
  std::vector<double> objective;  ///< exact objective after each round
  std::vector<double> omega;      ///< budget multiplier after each round
  int rounds = 0;
  int flagged_powers = 0;
  int fallback_powers = 0;
  int flagged_bandwidths = 0;
  int monotone_violations = 0;
  int budget_repairs = 0;
  int rate_repairs = 0;
  bool converged = false;
};

/// Outcome for one RRH.
struct RrhOutcome {
  double objective = 0.0;  ///< EC of its users minus q times its power share
  double ec = 0.0;
  double borrowed_ec = 0.0;
  double usage = 0.0;      ///< radiated power against P_max
  bool feasible = true;      ///< power budget met
  bool rates_met = true;     ///< every served user reaches R_fronthaul
  double shortfall = 0.0;    ///< summed rate deficit, bits/frame
  InnerTrace trace;
};

/// Solves the subproblem of RRH m for parameter q, updating only RRH m's part
/// of `state` and `mult`. `pair` selects the MBS user it serves, or kNoPair.
/// Of the rounds within budget, one meeting every rate target is preferred,
/// then the smallest total shortfall, then the larger exact objective. With
/// `restart`, a cold multi-start also runs and the better outcome is kept.
RrhOutcome solve_rrh(const Problem& pb, std::size_t m, std::size_t pair, double q,
                     const SolverSettings& settings, AllocationState& state,
                     DualMultipliers& mult, bool restart = false);

struct InnerResult {
  AllocationState state;
  DualMultipliers mult;
  std::vector<InnerTrace> traces;     ///< one per RRH
  std::vector<double> user_ec;
  std::vector<double> c1_residual;    ///< E_k - R_m on the serving RRH
  double objective = 0.0;             ///< EC - q P_T
  double ec = 0.0;
  double power = 0.0;
  bool feasible = true;
  bool converged = true;
};

/// Inner solve for a fixed assignment and q. Optional warm start.
InnerResult solve_inner(const Problem& pb, const Assignment& x, double q,
                        const SolverSettings& settings,
                        const AllocationState* warm_state = nullptr,
                        const DualMultipliers* warm_mult = nullptr);

/// Exact objective EC - q P_T with Q refreshed from w.
double subtractive_objective(const Problem& pb, const AllocationState& state,
                             const Assignment& x, double q);

/// MBS user pair served by RRH m in `x`, or kNoPair.
std::size_t pair_of(const Assignment& x, std::size_t m);

}  // namespace hcran
