#include "hcran/effcap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hcran/band.hpp"
#include "hcran/numerics.hpp"

namespace hcran {

EcEstimate effective_capacity(std::span<const double> rates, double theta) {
  if (rates.empty()) throw std::invalid_argument("effective_capacity: no samples");
  if (!(theta > 0.0)) throw std::invalid_argument("effective_capacity: theta must be > 0");
  const std::size_t N = rates.size();
  std::vector<double> x(N);
  for (std::size_t n = 0; n < N; ++n) x[n] = -theta * rates[n];
  EcEstimate out;
  out.N = N;
  out.value = -numerics::log_mean_exp(x) / theta;

  // Delta method on Y_n = exp(-theta r_n + c), shifted to stay in range.
  const double top = *std::max_element(x.begin(), x.end());
  std::vector<double> y(N);
  for (std::size_t n = 0; n < N; ++n) y[n] = std::exp(x[n] - top);
  const double ybar = numerics::mean(y);
  if (N > 1 && ybar > 0.0) {
    double ss = 0.0;
    for (double v : y) ss += (v - ybar) * (v - ybar);
    const double s = std::sqrt(ss / static_cast<double>(N - 1));
    out.std_error = s / std::sqrt(static_cast<double>(N)) / ybar / theta;
  }
  return out;
}

EcEstimate user_effective_capacity(std::size_t k, const AllocationState& state,
                                   const Assignment& x,
                                   const ChannelSampleSet& samples,
                                   const ScenarioConfig& cfg) {
  const std::size_t N = samples.N();
  std::vector<double> r(N);
  EcEstimate total;
  total.N = N;
  double var = 0.0;
  auto add = [&](const BandChannel& band, std::span<const double> powers) {
    if (!(powers[k] > 0.0) || !(band.bandwidth() > 0.0)) return;
    band.rates(k, powers, r);
    const EcEstimate e = effective_capacity(r, cfg.theta.at(k));
    total.value += e.value;
    var += e.std_error * e.std_error;
  };
  std::vector<double> P(state.K);
  for (std::size_t m = 0; m < state.M; ++m) {
    for (std::size_t i = 0; i < state.K; ++i) P[i] = state.p_at(i, m);
    if (P[k] > 0.0) add(BandChannel::native(samples, cfg, m), P);
  }
  for (std::size_t z = 0; z < state.Z; ++z) {
    for (std::size_t m = 0; m < state.M; ++m) {
      if (!x(z, m)) continue;
      for (std::size_t i = 0; i < state.K; ++i) P[i] = state.q_at(i, m, z);
      if (!(P[k] > 0.0)) continue;
      const double b = cfg.W_z.at(z) - state.w_at(m, z);
      if (!(b > 0.0)) continue;
      add(BandChannel::borrowed(samples, cfg, m, z, b), P);
    }
  }
  total.std_error = std::sqrt(var);
  return total;
}

double q_mbs_power_from_mean(double w, double mean_N0_over_H, double R, double T_f) {
  if (R <= 0.0) return 0.0;
  if (!(w > 0.0)) return std::numeric_limits<double>::infinity();
  const double x = R / (T_f * w);
  return mean_N0_over_H * w * std::expm1(x * numerics::kLn2);
}

double q_mbs_power_slope(double w, double mean_N0_over_H, double R, double T_f) {
  if (R <= 0.0) return 0.0;
  if (!(w > 0.0)) return -std::numeric_limits<double>::infinity();
  const double x = R / (T_f * w);
  const double e = std::exp2(x);
  return mean_N0_over_H * (e * (1.0 - x * numerics::kLn2) - 1.0);
}

double q_mbs_power(double w, std::span<const double> H, double R, double T_f,
                   double N0) {
  std::vector<double> inv(H.size());
  for (std::size_t n = 0; n < H.size(); ++n) inv[n] = N0 / H[n];
  return q_mbs_power_from_mean(w, numerics::mean(inv), R, T_f);
}

void refresh_mbs_power(AllocationState& state, const Assignment& x,
                       const ChannelSampleSet& samples, const ScenarioConfig& cfg) {
  for (std::size_t m = 0; m < state.M; ++m) {
    for (std::size_t z = 0; z < state.Z; ++z) {
      if (!x(z, m)) {
        state.Q_at(m, z) = 0.0;
        continue;
      }
      state.Q_at(m, z) = q_mbs_power(state.w_at(m, z), samples.H_samples(m, z),
                                     cfg.R_mbs.at(z), cfg.T_f, cfg.N0);
    }
  }
}

double rrh_power_usage(const AllocationState& state, const Assignment& x,
                       std::size_t m) {
  double used = 0.0;
  for (std::size_t k = 0; k < state.K; ++k) used += state.p_at(k, m);
  for (std::size_t z = 0; z < state.Z; ++z) {
    if (!x(z, m)) continue;
    for (std::size_t k = 0; k < state.K; ++k) used += state.q_at(k, m, z);
    used += state.Q_at(m, z);
  }
  return used;
}

PowerBreakdown total_power(const AllocationState& state, const Assignment& x,
                           const ScenarioConfig& cfg) {
  PowerBreakdown pb;
  for (std::size_t m = 0; m < state.M; ++m) {
    const double zeta = cfg.power_weight(m);
    pb.circuit += cfg.P_c.at(m);
    pb.fiber += cfg.P_f.at(m);
    for (std::size_t k = 0; k < state.K; ++k) pb.dynamic_native += zeta * state.p_at(k, m);
    for (std::size_t z = 0; z < state.Z; ++z) {
      if (!x(z, m)) continue;
      for (std::size_t k = 0; k < state.K; ++k)
        pb.dynamic_borrowed += zeta * state.q_at(k, m, z);
      pb.dynamic_mbs_serving += zeta * state.Q_at(m, z);
    }
  }
  pb.total = pb.circuit + pb.fiber + pb.dynamic_native + pb.dynamic_borrowed +
             pb.dynamic_mbs_serving;
  return pb;
}

double total_effective_capacity(const AllocationState& state, const Assignment& x,
                                const ChannelSampleSet& samples,
                                const ScenarioConfig& cfg) {
  double ec = 0.0;
  for (std::size_t k = 0; k < state.K; ++k)
    ec += user_effective_capacity(k, state, x, samples, cfg).value;
  return ec;
}

double eee(const AllocationState& state, const Assignment& x,
           const ChannelSampleSet& samples, const ScenarioConfig& cfg) {
  return total_effective_capacity(state, x, samples, cfg) / total_power(state, x, cfg).total;
}

}  // namespace hcran
