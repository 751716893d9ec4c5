#include "hcran/noma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hcran {

std::vector<std::size_t> sic_order(std::span<const double> gains) {
  std::vector<std::size_t> idx(gains.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return gains[a] > gains[b];
  });
  return idx;
}

namespace {

double sinr_on_band(std::size_t k, std::span<const double> p,
                    std::span<const double> g, double noise) {
  if (p.size() != g.size() || k >= p.size()) {
    throw std::invalid_argument("sinr: size mismatch");
  }
  const auto order = sic_order(g);
  const auto pos = std::find(order.begin(), order.end(), k);
  double tail = 0.0;
  for (auto it = pos + 1; it != order.end(); ++it) tail += p[*it];
  return p[k] * g[k] / (tail * g[k] + noise);
}

}  // namespace

double sinr_native(std::size_t k, std::span<const double> p,
                   std::span<const double> g, double B, double N0) {
  return sinr_on_band(k, p, g, B * N0);
}

double sinr_borrowed(std::size_t k, std::span<const double> q,
                     std::span<const double> h, double b, double N0) {
  return sinr_on_band(k, q, h, b * N0);
}

double rate_native(std::size_t k, std::size_t m, const AllocationState& state,
                   const ChannelSampleSet& samples, std::size_t n,
                   const ScenarioConfig& cfg) {
  const std::size_t K = state.K;
  std::vector<double> p(K), g(K);
  for (std::size_t i = 0; i < K; ++i) {
    p[i] = state.p_at(i, m);
    g[i] = samples.g(n, i, m);
  }
  if (p[k] <= 0.0) return 0.0;
  return cfg.B * cfg.T_f * std::log2(1.0 + sinr_native(k, p, g, cfg.B, cfg.N0));
}

double rate_borrowed(std::size_t k, std::size_t m, std::size_t z,
                     const AllocationState& state,
                     const ChannelSampleSet& samples, std::size_t n,
                     const ScenarioConfig& cfg) {
  const double b = cfg.W_z.at(z) - state.w_at(m, z);
  if (!(b > 0.0)) return 0.0;
  const std::size_t K = state.K;
  std::vector<double> q(K), h(K);
  for (std::size_t i = 0; i < K; ++i) {
    q[i] = state.q_at(i, m, z);
    h[i] = samples.h(n, i, m, z);
  }
  if (q[k] <= 0.0) return 0.0;
  return b * cfg.T_f * std::log2(1.0 + sinr_borrowed(k, q, h, b, cfg.N0));
}

double rate_mbs_user(std::size_t m, std::size_t z, const AllocationState& state,
                     const ChannelSampleSet& samples, std::size_t n,
                     const ScenarioConfig& cfg) {
  const double w = state.w_at(m, z);
  const double Q = state.Q_at(m, z);
  if (!(w > 0.0) || !(Q > 0.0)) return 0.0;
  return w * cfg.T_f * std::log2(1.0 + Q * samples.H(n, m, z) / (w * cfg.N0));
}

bool check_exclusivity(const AllocationState& state, double eps) {
  for (std::size_t k = 0; k < state.K; ++k)
    for (std::size_t m = 0; m < state.M; ++m)
      for (std::size_t m2 = m + 1; m2 < state.M; ++m2)
        if (state.p_at(k, m) * state.p_at(k, m2) > eps) return false;
  return true;
}

DecodabilitySides sic_decodability(double p_kp, double g_k, double g_kp,
                                   double others, double noise) {
  return {p_kp * g_k / (others * g_k + noise), p_kp * g_kp / (others * g_kp + noise)};
}

}  // namespace hcran
