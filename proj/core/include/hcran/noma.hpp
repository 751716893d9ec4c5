#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hcran/scenario.hpp"
#include "hcran/state.hpp"

namespace hcran {

/// Users sorted by descending gain; ties keep the lower index first.
std::vector<std::size_t> sic_order(std::span<const double> gains);

/// SINR of user k when every user decoded after it (later in sic_order)
/// interferes, scaled by k's own gain.
double sinr_native(std::size_t k, std::span<const double> p,
                   std::span<const double> g, double B, double N0);

/// Same rule on a borrowed band of width b with powers q and gains h.
double sinr_borrowed(std::size_t k, std::span<const double> q,
                     std::span<const double> h, double b, double N0);

/// Per-frame rates in fading state n (bits/frame).
double rate_native(std::size_t k, std::size_t m, const AllocationState& state,
                   const ChannelSampleSet& samples, std::size_t n,
                   const ScenarioConfig& cfg);
double rate_borrowed(std::size_t k, std::size_t m, std::size_t z,
                     const AllocationState& state,
                     const ChannelSampleSet& samples, std::size_t n,
                     const ScenarioConfig& cfg);
double rate_mbs_user(std::size_t m, std::size_t z, const AllocationState& state,
                     const ChannelSampleSet& samples, std::size_t n,
                     const ScenarioConfig& cfg);

/// True iff p[k][m] * p[k][m'] <= eps for every user and RRH pair.
bool check_exclusivity(const AllocationState& state, double eps);

/// Both sides of the SIC decodability condition: user k decoding the stream
/// of user kp, with `others` the summed power of users at least as strong as
/// kp (excluding kp) and `noise` = B N0.
struct DecodabilitySides {
  double at_k = 0.0;
  double at_kp = 0.0;
  bool holds() const { return at_k >= at_kp; }
};
DecodabilitySides sic_decodability(double p_kp, double g_k, double g_kp,
                                   double others, double noise);

}  // namespace hcran
