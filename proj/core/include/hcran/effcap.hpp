#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hcran/scenario.hpp"
#include "hcran/state.hpp"

namespace hcran {

struct EcEstimate {
  double value = 0.0;      ///< bits/frame
  double std_error = 0.0;  ///< bits/frame
  std::size_t N = 0;
};

/// -(1/theta) ln mean_n exp(-theta r_n), with a delta-method standard error.
EcEstimate effective_capacity(std::span<const double> rates, double theta);

/// Native-band EC on every RRH plus borrowed-band EC on every assigned pair.
EcEstimate user_effective_capacity(std::size_t k, const AllocationState& state,
                                   const Assignment& x,
                                   const ChannelSampleSet& samples,
                                   const ScenarioConfig& cfg);

/// Sample mean over H of the channel-inversion power (w N0 / H)(2^{R/(T_f w)} - 1).
/// Returns +inf for w <= 0 with R > 0, 0 when R = 0.
double q_mbs_power(double w, std::span<const double> H, double R, double T_f,
                   double N0);

/// Same as q_mbs_power from the precomputed mean of N0 / H.
double q_mbs_power_from_mean(double w, double mean_N0_over_H, double R, double T_f);

/// d/dw of q_mbs_power_from_mean.
double q_mbs_power_slope(double w, double mean_N0_over_H, double R, double T_f);

/// Recomputes Q[m][z] from w for every assigned pair and zeroes the rest.
void refresh_mbs_power(AllocationState& state, const Assignment& x,
                       const ChannelSampleSet& samples, const ScenarioConfig& cfg);

struct PowerBreakdown {
  double circuit = 0.0;
  double fiber = 0.0;
  double dynamic_native = 0.0;
  double dynamic_borrowed = 0.0;
  double dynamic_mbs_serving = 0.0;
  double total = 0.0;
};

/// Static terms plus weighted radiated power. Q is taken from `state`.
PowerBreakdown total_power(const AllocationState& state, const Assignment& x,
                           const ScenarioConfig& cfg);

/// Average radiated power of RRH m (left side of the per-RRH budget).
double rrh_power_usage(const AllocationState& state, const Assignment& x,
                       std::size_t m);

/// Sum of user EC over total power.
double eee(const AllocationState& state, const Assignment& x,
           const ChannelSampleSet& samples, const ScenarioConfig& cfg);

/// Sum of user EC.
double total_effective_capacity(const AllocationState& state, const Assignment& x,
                                const ChannelSampleSet& samples,
                                const ScenarioConfig& cfg);

}  // namespace hcran
