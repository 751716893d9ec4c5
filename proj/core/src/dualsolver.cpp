#include "hcran/dualsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hcran/noma.hpp"
#include "hcran/numerics.hpp"

namespace hcran {

using numerics::kLn2;

void SolverSettings::validate() const {
  if (max_inner_iters < 1 || min_inner_iters < 1) throw std::invalid_argument("inner iteration counts must be >= 1");
  if (!(inner_tol > 0.0) || !(newton_tol > 0.0) || !(eps_excl > 0.0) ||
      !(dinkelbach_eps > 0.0)) {
    throw std::invalid_argument("solver tolerances must be > 0");
  }
  if (!(beta1 > 0.0) || !(beta2 > 0.0) || !(beta3 > 0.0)) {
    throw std::invalid_argument("step sizes must be > 0");
  }
  if (stall_rounds < 1) throw std::invalid_argument("stall_rounds must be >= 1");
  if (max_outer_iters < 1 || newton_max_iter < 1) throw std::invalid_argument("iteration caps must be >= 1");
}

Problem::Problem(const ScenarioConfig& cfg, const ChannelSampleSet& samples)
    : cfg_(cfg), samples_(samples) {
  const std::size_t K = cfg.K, M = cfg.M, Z = cfg.Z;
  if (samples.K() != K || samples.M() != M || samples.Z() != Z) {
    throw std::invalid_argument("Problem: samples do not match the scenario sizes");
  }
  native_.reserve(M);
  for (std::size_t m = 0; m < M; ++m) native_.push_back(BandChannel::native(samples, cfg, m));
  borrowed_.reserve(M * Z);
  n0_over_H_.resize(M * Z);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t z = 0; z < Z; ++z) {
      borrowed_.push_back(BandChannel::borrowed(samples, cfg, m, z, cfg.W_z.at(z)));
      std::vector<double> inv(samples.N());
      for (std::size_t n = 0; n < samples.N(); ++n) inv[n] = cfg.N0 / samples.H(n, m, z);
      n0_over_H_[m * Z + z] = numerics::mean(inv);
    }
  }
  mean_g_.resize(K * M);
  mean_h_.resize(K * M * Z);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t m = 0; m < M; ++m) {
      mean_g_[k * M + m] = samples.mean_g(k, m);
      for (std::size_t z = 0; z < Z; ++z) mean_h_[(k * M + m) * Z + z] = samples.mean_h(k, m, z);
    }
  std::vector<std::size_t> serving(K, 0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 1; m < M; ++m)
      if (mean_g(k, m) > mean_g(k, serving[k])) serving[k] = m;
  }
  set_association(serving);
}

void Problem::set_association(const std::vector<std::size_t>& serving) {
  if (serving.size() != K()) throw std::invalid_argument("association size must be K");
  serving_ = serving;
  users_.assign(M(), {});
  for (std::size_t k = 0; k < K(); ++k) {
    if (serving[k] >= M()) throw std::invalid_argument("association names an unknown RRH");
    users_[serving[k]].push_back(k);
  }
}

double Problem::mbs_power(std::size_t m, std::size_t z, double w) const {
  return q_mbs_power_from_mean(w, mean_N0_over_H(m, z), cfg_.R_mbs.at(z), cfg_.T_f);
}

std::size_t pair_of(const Assignment& x, std::size_t m) {
  for (std::size_t z = 0; z < x.Z(); ++z)
    if (x(z, m)) return z;
  return kNoPair;
}

namespace {

// Largest w in (0, W) with Q(w) <= target, or W itself when Q(W) > target.
double bandwidth_for_power(const Problem& pb, std::size_t m, std::size_t z,
                           double target) {
  const double W = pb.cfg().W_z.at(z);
  const double hi = W * (1.0 - 1e-6);
  if (pb.mbs_power(m, z, hi) >= target) return hi;
  const double lo = W * 1e-9;
  if (pb.mbs_power(m, z, lo) <= target) return lo;
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < 200 && b - a > 1e-13; ++i) {
    const double mid = 0.5 * (a + b);
    if (pb.mbs_power(m, z, std::exp(mid)) > target) a = mid; else b = mid;
  }
  return std::exp(b);
}

}  // namespace

void initialize_rrh(const Problem& pb, std::size_t m, std::size_t pair,
                    AllocationState& state, double fraction) {
  const std::size_t K = pb.K(), Z = pb.Z();
  for (std::size_t k = 0; k < K; ++k) {
    state.p_at(k, m) = 0.0;
    for (std::size_t z = 0; z < Z; ++z) state.q_at(k, m, z) = 0.0;
  }
  for (std::size_t z = 0; z < Z; ++z) {
    state.w_at(m, z) = 0.0;
    state.Q_at(m, z) = 0.0;
  }
  const auto& users = pb.users_of(m);
  const std::size_t active = users.size() + (pair != kNoPair ? 1 : 0);
  if (active == 0) return;
  const double share = fraction * pb.cfg().P_max.at(m) / static_cast<double>(active);
  for (std::size_t k : users) {
    state.p_at(k, m) = 0.5 * share;
    if (pair != kNoPair) state.q_at(k, m, pair) = 0.5 * share;
  }
  if (pair != kNoPair) {
    const double w = users.empty() ? pb.cfg().W_z.at(pair) * (1.0 - 1e-6)
                                   : bandwidth_for_power(pb, m, pair, share);
    state.w_at(m, pair) = w;
    state.Q_at(m, pair) = pb.mbs_power(m, pair, w);
  }
}

AllocationState initial_state(const Problem& pb, const Assignment& x) {
  AllocationState s(pb.K(), pb.M(), pb.Z());
  for (std::size_t m = 0; m < pb.M(); ++m) initialize_rrh(pb, m, pair_of(x, m), s);
  return s;
}

namespace {

void expansion_for_rrh(const Problem& pb, const AllocationState& state,
                       std::size_t m, std::size_t pair, ScaConstants& c) {
  const auto& cfg = pb.cfg();
  const std::size_t K = pb.K();
  std::vector<double> P(K), g(K);
  for (std::size_t k = 0; k < K; ++k) {
    P[k] = state.p_at(k, m);
    g[k] = pb.mean_g(k, m);
  }
  // Served users are expanded no lower than the SINR that meets the rate
  // target, so a user whose power has collapsed still sees a useful slope.
  const double target = std::exp2(cfg.R_fronthaul.at(m) / (cfg.B * cfg.T_f)) - 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    double zbar = P[k] > 0.0 ? sinr_native(k, P, g, cfg.B, cfg.N0) : 0.0;
    if (pb.serving_rrh(k) == m) zbar = std::max(zbar, target);
    c.set_native(k, m, log_bound_at(zbar));
  }
  for (std::size_t z = 0; z < pb.Z(); ++z)
    for (std::size_t k = 0; k < K; ++k) c.set_borrowed(k, m, z, {});
  if (pair == kNoPair) return;
  const double b = cfg.W_z.at(pair) - state.w_at(m, pair);
  for (std::size_t k = 0; k < K; ++k) {
    P[k] = state.q_at(k, m, pair);
    g[k] = pb.mean_h(k, m, pair);
  }
  for (std::size_t k = 0; k < K; ++k) {
    const double zbar = (P[k] > 0.0 && b > 0.0) ? sinr_borrowed(k, P, g, b, cfg.N0) : 0.0;
    c.set_borrowed(k, m, pair, log_bound_at(zbar));
  }
}

BandChannel borrowed_at(const Problem& pb, std::size_t m, std::size_t z, double w) {
  BandChannel band = pb.borrowed(m, z);
  band.set_bandwidth(std::max(0.0, pb.cfg().W_z.at(z) - w));
  return band;
}

std::vector<double> column_p(const AllocationState& s, std::size_t m) {
  std::vector<double> P(s.K);
  for (std::size_t k = 0; k < s.K; ++k) P[k] = s.p_at(k, m);
  return P;
}

std::vector<double> column_q(const AllocationState& s, std::size_t m, std::size_t z) {
  std::vector<double> P(s.K);
  for (std::size_t k = 0; k < s.K; ++k) P[k] = s.q_at(k, m, z);
  return P;
}

double band_ec(const BandChannel& band, std::size_t k, std::span<const double> P,
               double theta, std::vector<double>& scratch) {
  if (!(P[k] > 0.0) || !(band.bandwidth() > 0.0)) return 0.0;
  scratch.resize(band.N());
  band.rates(k, P, scratch);
  return effective_capacity(scratch, theta).value;
}

// d/db of the bounded EC of user k on `band` (bandwidth b), powers fixed.
double bounded_ec_bandwidth_slope(const BandChannel& band, std::size_t k,
                                  std::span<const double> P, const BandTerms& t) {
  const double slope = t.slope[k];
  if (!(P[k] > 0.0) || !(band.bandwidth() > 0.0)) return 0.0;
  const std::size_t N = band.N(), K = band.K();
  std::vector<double> S(N * K), x(N), d(N);
  band.interferer_power(P, S);
  const double b = band.bandwidth();
  const double Tf = band.T_f();
  const double sigma = t.theta[k] * b * Tf;
  for (std::size_t n = 0; n < N; ++n) {
    const double g = band.gain(n, k);
    const double interf = S[n * K + k] * g;
    const double rho = slope * std::log2(P[k] * g / (interf + band.noise())) + t.intercept[k];
    x[n] = -sigma * rho;
    d[n] = Tf * rho - b * Tf * slope * band.N0() / (kLn2 * (interf + band.noise()));
  }
  const double top = *std::max_element(x.begin(), x.end());
  double wsum = 0.0, acc = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double wgt = std::exp(x[n] - top);
    wsum += wgt;
    acc += wgt * d[n];
  }
  return acc / wsum;
}

}  // namespace

ScaConstants expansion_constants(const Problem& pb, const AllocationState& state,
                                 const Assignment& x) {
  ScaConstants c(pb.K(), pb.M(), pb.Z());
  for (std::size_t m = 0; m < pb.M(); ++m) expansion_for_rrh(pb, state, m, pair_of(x, m), c);
  return c;
}

BandTerms band_terms(const Problem& pb, std::size_t m, std::size_t z,
                     const ScaConstants& sca, const DualMultipliers& mult) {
  const std::size_t K = pb.K();
  BandTerms t;
  t.slope.resize(K);
  t.intercept.resize(K);
  t.theta.resize(K);
  t.weight.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const LogBound b = z == kNoPair ? sca.native(k, m) : sca.borrowed(k, m, z);
    t.slope[k] = b.slope;
    t.intercept[k] = b.intercept;
    t.theta[k] = pb.cfg().theta.at(k);
    t.weight[k] = 1.0 + mult.mu_at(k, m);
  }
  return t;
}

double power_price(const Problem& pb, std::size_t k, std::size_t m,
                   const DualMultipliers& mult, const AllocationState& state,
                   double q) {
  double price = q * pb.cfg().power_weight(m) + mult.omega[m];
  for (std::size_t m2 = 0; m2 < pb.M(); ++m2)
    if (m2 != m) price += mult.varpi_at(k, m, m2) * state.p_at(k, m2);
  return price;
}

PowerUpdate power_native_closed_form(std::size_t k, std::size_t m,
                                     const DualMultipliers& mult,
                                     const ScaConstants& sca,
                                     const AllocationState& state,
                                     const Problem& pb, double q) {
  const auto P = column_p(state, m);
  return closed_form_power(pb.native(m), k, P, band_terms(pb, m, kNoPair, sca, mult),
                           power_price(pb, k, m, mult, state, q), pb.cfg().P_max.at(m));
}

PowerUpdate power_borrowed_closed_form(std::size_t k, std::size_t m, std::size_t z,
                                       const DualMultipliers& mult,
                                       const ScaConstants& sca,
                                       const AllocationState& state,
                                       const Problem& pb, double q) {
  const BandChannel band = borrowed_at(pb, m, z, state.w_at(m, z));
  if (!(band.bandwidth() > 0.0)) {
    PowerUpdate out;
    out.zero = true;
    return out;
  }
  const auto P = column_q(state, m, z);
  return closed_form_power(band, k, P, band_terms(pb, m, z, sca, mult),
                           power_price(pb, k, m, mult, state, q), pb.cfg().P_max.at(m));
}

namespace {

struct ResidualParts {
  double ec_part = 0.0;     // -sum weight dE/db  (= sum weight dE/dw)
  double power_part = 0.0;  // -(q zeta + omega) dQ/dw
};

ResidualParts residual_parts(std::size_t m, std::size_t z, double w,
                             const DualMultipliers& mult, const ScaConstants& sca,
                             const AllocationState& state, const Problem& pb,
                             double q) {
  const BandChannel band = borrowed_at(pb, m, z, w);
  const auto P = column_q(state, m, z);
  const BandTerms t = band_terms(pb, m, z, sca, mult);
  ResidualParts r;
  for (std::size_t k : pb.users_of(m)) {
    r.ec_part -= t.weight[k] * bounded_ec_bandwidth_slope(band, k, P, t);
  }
  const double price = q * pb.cfg().power_weight(m) + mult.omega[m];
  const double dQ = q_mbs_power_slope(w, pb.mean_N0_over_H(m, z), pb.cfg().R_mbs.at(z),
                                      pb.cfg().T_f);
  r.power_part = price > 0.0 ? -price * dQ : 0.0;
  return r;
}

}  // namespace

double bandwidth_residual(std::size_t m, std::size_t z, double w,
                          const DualMultipliers& mult, const ScaConstants& sca,
                          const AllocationState& state, const Problem& pb,
                          double q) {
  const ResidualParts r = residual_parts(m, z, w, mult, sca, state, pb, q);
  return r.ec_part + r.power_part;
}

double bandwidth_lagrangian(std::size_t m, std::size_t z, double w,
                            const DualMultipliers& mult, const ScaConstants& sca,
                            const AllocationState& state, const Problem& pb,
                            double q) {
  const BandChannel band = borrowed_at(pb, m, z, w);
  const auto P = column_q(state, m, z);
  const BandTerms t = band_terms(pb, m, z, sca, mult);
  double L = 0.0;
  if (band.bandwidth() > 0.0) {
    for (std::size_t k : pb.users_of(m))
      if (P[k] > 0.0) L += t.weight[k] * surrogate_ec(band, k, P, t);
  }
  const double price = q * pb.cfg().power_weight(m) + mult.omega[m];
  if (price > 0.0) L -= price * pb.mbs_power(m, z, w);
  return L;
}

BandwidthResult bandwidth_newton(std::size_t m, std::size_t z,
                                 const DualMultipliers& mult,
                                 const ScaConstants& sca,
                                 const AllocationState& state, const Problem& pb,
                                 double q, const SolverSettings& settings) {
  const double W = pb.cfg().W_z.at(z);
  const double w_hi = W * (1.0 - 1e-6);
  double used = 0.0;
  for (std::size_t k = 0; k < pb.K(); ++k) used += state.p_at(k, m) + state.q_at(k, m, z);
  const double budget = pb.cfg().P_max.at(m) - used;

  BandwidthResult out;
  if (!(pb.mbs_power(m, z, w_hi) <= budget)) {
    out.w = w_hi;
    out.lower = w_hi;
    out.flagged = true;
    out.infeasible = true;
    out.residual = bandwidth_residual(m, z, w_hi, mult, sca, state, pb, q);
    return out;
  }
  const double w_lo = bandwidth_for_power(pb, m, z, budget);
  out.lower = w_lo;

  auto f = [&](double w) { return bandwidth_residual(m, z, w, mult, sca, state, pb, q); };
  const double f_lo = f(w_lo);
  const double f_hi = f(w_hi);
  const double x0 = std::clamp(state.w_at(m, z) > 0.0 ? state.w_at(m, z) : 0.5 * (w_lo + w_hi),
                               w_lo, w_hi);
  {
    const ResidualParts r = residual_parts(m, z, x0, mult, sca, state, pb, q);
    out.scale = std::max(std::abs(r.ec_part) + std::abs(r.power_part), 1e-300);
  }

  if (f_lo > 0.0 && f_hi < 0.0) {
    const double h = 1e-7 * W;
    auto df = [&](double w) {
      const double a = std::max(w_lo, w - h);
      const double b = std::min(w_hi, w + h);
      return (f(b) - f(a)) / (b - a);
    };
    auto r = numerics::safeguarded_newton(f, df, w_lo, w_hi, x0,
                                          settings.newton_tol * out.scale, 1e-13,
                                          settings.newton_max_iter);
    out.w = r.x;
    out.residual = r.residual;
    out.iterations = r.iterations;
    return out;
  }
  if (w_hi <= w_lo) {
    out.w = w_hi;
    out.residual = f_hi;
    return out;
  }
  // No interior sign change: keep the endpoint with the larger Lagrangian.
  const double L_lo = bandwidth_lagrangian(m, z, w_lo, mult, sca, state, pb, q);
  const double L_hi = bandwidth_lagrangian(m, z, w_hi, mult, sca, state, pb, q);
  out.flagged = true;
  if (L_lo >= L_hi) {
    out.w = w_lo;
    out.residual = f_lo;
  } else {
    out.w = w_hi;
    out.residual = f_hi;
  }
  return out;
}

std::vector<double> exact_user_ec(const Problem& pb, const AllocationState& state,
                                  const Assignment& x) {
  const auto& cfg = pb.cfg();
  std::vector<double> ec(pb.K(), 0.0), scratch;
  for (std::size_t m = 0; m < pb.M(); ++m) {
    const auto P = column_p(state, m);
    for (std::size_t k = 0; k < pb.K(); ++k)
      ec[k] += band_ec(pb.native(m), k, P, cfg.theta.at(k), scratch);
    for (std::size_t z = 0; z < pb.Z(); ++z) {
      if (!x(z, m)) continue;
      const BandChannel band = borrowed_at(pb, m, z, state.w_at(m, z));
      const auto Qv = column_q(state, m, z);
      for (std::size_t k = 0; k < pb.K(); ++k)
        ec[k] += band_ec(band, k, Qv, cfg.theta.at(k), scratch);
    }
  }
  return ec;
}

DualMultipliers update_multipliers(std::size_t t, const DualMultipliers& mult,
                                   const AllocationState& state,
                                   const Assignment& x,
                                   std::span<const double> user_ec,
                                   const Problem& pb,
                                   const SolverSettings& settings) {
  if (t < 1) throw std::invalid_argument("update_multipliers: t must be >= 1");
  const double root = std::sqrt(static_cast<double>(t));
  DualMultipliers next = mult;
  const auto& cfg = pb.cfg();
  for (std::size_t k = 0; k < pb.K(); ++k) {
    const std::size_t m = pb.serving_rrh(k);
    const double v = next.mu_at(k, m) - settings.beta1 / root * (user_ec[k] - cfg.R_fronthaul.at(m));
    next.mu_at(k, m) = std::max(0.0, v);
  }
  for (std::size_t m = 0; m < pb.M(); ++m) {
    const double v = next.omega[m] +
                     settings.beta2 / root * (rrh_power_usage(state, x, m) - cfg.P_max.at(m));
    next.omega[m] = std::max(0.0, v);
  }
  for (std::size_t k = 0; k < pb.K(); ++k)
    for (std::size_t m = 0; m < pb.M(); ++m)
      for (std::size_t m2 = 0; m2 < pb.M(); ++m2) {
        if (m2 == m) continue;
        const double v = next.varpi_at(k, m, m2) +
                         settings.beta3 / root * state.p_at(k, m) * state.p_at(k, m2);
        next.varpi_at(k, m, m2) = std::max(0.0, v);
      }
  return next;
}

namespace {

struct RrhSnapshot {
  std::vector<double> p, q, mu;
  double w = 0.0, Q = 0.0, omega = 0.0;
};

RrhSnapshot take(const AllocationState& s, const DualMultipliers& mult, std::size_t m,
                 std::size_t pair) {
  RrhSnapshot snap;
  snap.p = column_p(s, m);
  if (pair != kNoPair) {
    snap.q = column_q(s, m, pair);
    snap.w = s.w_at(m, pair);
    snap.Q = s.Q_at(m, pair);
  }
  snap.mu.resize(s.K);
  for (std::size_t k = 0; k < s.K; ++k) snap.mu[k] = mult.mu_at(k, m);
  snap.omega = mult.omega[m];
  return snap;
}

void restore(const RrhSnapshot& snap, AllocationState& s, DualMultipliers& mult,
             std::size_t m, std::size_t pair) {
  for (std::size_t k = 0; k < s.K; ++k) {
    s.p_at(k, m) = snap.p[k];
    mult.mu_at(k, m) = snap.mu[k];
    if (pair != kNoPair) s.q_at(k, m, pair) = snap.q[k];
  }
  if (pair != kNoPair) {
    s.w_at(m, pair) = snap.w;
    s.Q_at(m, pair) = snap.Q;
  }
  mult.omega[m] = snap.omega;
}

struct Frozen {
  double A = 0.0, pi = 0.0, base = 0.0, cap = 0.0;
};

double predicted_power(const Frozen& f, double omega) {
  if (!(f.A > 0.0)) return 0.0;
  const double den = f.base + omega + f.pi;
  if (!(den > 0.0)) return f.cap;
  return std::min(f.cap, f.A / den);
}

// Smallest omega >= 0 whose frozen-interference power prediction fits the
// budget, or the current value when even a huge price cannot fit.
double budget_multiplier(const std::vector<Frozen>& items, double fixed,
                         double budget, double current) {
  if (fixed >= budget) return current;
  auto usage = [&](double omega) {
    double u = fixed;
    for (const Frozen& f : items) u += predicted_power(f, omega);
    return u;
  };
  if (usage(0.0) <= budget) return 0.0;
  double hi = 1.0;
  int guard = 0;
  while (usage(hi) > budget && guard++ < 1000) hi *= 2.0;
  if (usage(hi) > budget) return current;
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (usage(mid) > budget) lo = mid; else hi = mid;
  }
  return hi;
}

}  // namespace

namespace {

// Same preference as between rounds: budget, rate targets, objective.
bool outcome_better(const RrhOutcome& a, const RrhOutcome& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.rates_met != b.rates_met) return a.rates_met;
  if (!a.rates_met && a.shortfall != b.shortfall) return a.shortfall < b.shortfall;
  return a.objective > b.objective;
}

RrhOutcome run_rrh(const Problem& pb, std::size_t m, std::size_t pair, double q,
                     const SolverSettings& settings, AllocationState& state,
                     DualMultipliers& mult) {
  const auto& cfg = pb.cfg();
  const std::size_t K = pb.K(), Z = pb.Z();
  const auto& users = pb.users_of(m);
  const double zeta = cfg.power_weight(m);
  const double P_max = cfg.P_max.at(m);
  const double static_power = cfg.P_c.at(m) + cfg.P_f.at(m);
  const double R = cfg.R_fronthaul.at(m);
  // Rates target met up to rounding.
  const double slack = 1e-9 * std::max(1.0, R);

  if (pair != kNoPair) state.Q_at(m, pair) = pb.mbs_power(m, pair, state.w_at(m, pair));

  BandChannel bb;
  if (pair != kNoPair) bb = borrowed_at(pb, m, pair, state.w_at(m, pair));
  const BandChannel& nb = pb.native(m);
  std::vector<double> scratch;

  struct Eval {
    double objective, ec, borrowed_ec, usage, shortfall;
    bool feasible;
    std::vector<double> user_ec;
  };
  auto evaluate = [&]() {
    Eval e{0.0, 0.0, 0.0, 0.0, 0.0, true, {}};
    const auto P = column_p(state, m);
    std::vector<double> Qv;
    if (pair != kNoPair) Qv = column_q(state, m, pair);
    e.user_ec.assign(K, 0.0);
    for (std::size_t k : users) {
      const double theta = cfg.theta.at(k);
      double v = band_ec(nb, k, P, theta, scratch);
      if (pair != kNoPair) {
        const double vb = band_ec(bb, k, Qv, theta, scratch);
        e.borrowed_ec += vb;
        v += vb;
      }
      e.user_ec[k] = v;
      e.ec += v;
      e.shortfall += std::max(0.0, R - v);
    }
    for (std::size_t k = 0; k < K; ++k) {
      e.usage += P[k];
      if (pair != kNoPair) e.usage += Qv[k];
    }
    if (pair != kNoPair) e.usage += state.Q_at(m, pair);
    e.feasible = std::isfinite(e.usage) && e.usage <= P_max * (1.0 + 1e-9);
    e.objective = e.ec - q * (static_power + zeta * e.usage);
    return e;
  };

  RrhOutcome out;
  Eval cur = evaluate();
  // Budget first, then the rate targets (smallest total shortfall), then the
  // exact objective.
  auto better = [&](const Eval& a, const Eval& b) {
    const bool a_ok = a.shortfall <= slack, b_ok = b.shortfall <= slack;
    if (a_ok != b_ok) return a_ok;
    if (!a_ok && a.shortfall != b.shortfall) return a.shortfall < b.shortfall;
    return a.objective > b.objective;
  };
  RrhSnapshot best = take(state, mult, m, pair);
  Eval best_eval = cur;
  bool have_best = cur.feasible;
  if (users.empty()) {
    out.objective = cur.objective;
    out.usage = cur.usage;
    out.feasible = cur.feasible;
    out.rates_met = true;
    out.trace.converged = true;
    return out;
  }

  ScaConstants sca(K, pb.M(), Z);
  double prev = cur.objective;
  InnerTrace& tr = out.trace;
  int last_gain = 0;
  for (int t = 1; t <= settings.max_inner_iters; ++t) {
    expansion_for_rrh(pb, state, m, pair, sca);
    const BandTerms tn = band_terms(pb, m, kNoPair, sca, mult);
    BandTerms tb;
    if (pair != kNoPair) tb = band_terms(pb, m, pair, sca, mult);
    std::vector<double> Pn = column_p(state, m);
    std::vector<double> Pb;
    if (pair != kNoPair) Pb = column_q(state, m, pair);

    if (settings.omega_bisection) {
      std::vector<Frozen> items;
      const double bwTn = nb.bandwidth() * nb.T_f();
      for (std::size_t k : users) {
        Frozen f;
        f.A = tn.weight[k] * bwTn * tn.slope[k] / kLn2;
        f.pi = interference_price(nb, k, Pn, tn);
        f.base = power_price(pb, k, m, mult, state, q) - mult.omega[m];
        f.cap = P_max;
        items.push_back(f);
      }
      if (pair != kNoPair && bb.bandwidth() > 0.0) {
        const double bwTb = bb.bandwidth() * bb.T_f();
        for (std::size_t k : users) {
          Frozen f;
          f.A = tb.weight[k] * bwTb * tb.slope[k] / kLn2;
          f.pi = interference_price(bb, k, Pb, tb);
          f.base = power_price(pb, k, m, mult, state, q) - mult.omega[m];
          f.cap = P_max;
          items.push_back(f);
        }
      }
      const double fixed = pair != kNoPair ? state.Q_at(m, pair) : 0.0;
      mult.omega[m] = budget_multiplier(items, fixed, P_max, mult.omega[m]);
    }

    auto update = [&](const BandChannel& band, std::vector<double>& P,
                      const BandTerms& terms, std::size_t k) {
      const double price = power_price(pb, k, m, mult, state, q);
      PowerUpdate u = closed_form_power(band, k, P, terms, price, P_max);
      double p = u.power;
      if (u.flagged()) {
        ++tr.flagged_powers;
        if (settings.numeric_fallback) {
          p = numeric_power(band, k, P, terms, price, P_max);
          ++tr.fallback_powers;
        }
      }
      P[k] = p;
    };
    for (std::size_t k : users) update(nb, Pn, tn, k);
    for (std::size_t k : users) state.p_at(k, m) = Pn[k];
    if (pair != kNoPair && bb.bandwidth() > 0.0) {
      for (std::size_t k : users) update(bb, Pb, tb, k);
      for (std::size_t k : users) state.q_at(k, m, pair) = Pb[k];
    }

    if (pair != kNoPair) {
      const BandwidthResult br = bandwidth_newton(m, pair, mult, sca, state, pb, q, settings);
      if (br.flagged) ++tr.flagged_bandwidths;
      state.w_at(m, pair) = br.w;
      state.Q_at(m, pair) = pb.mbs_power(m, pair, br.w);
      bb.set_bandwidth(cfg.W_z.at(pair) - br.w);
    }

    // Rate repair: lift the native power of users short of R to the smallest
    // value meeting it, weakest user first (its EC only grows with its power).
    if (R > 0.0 && settings.rate_repair) {
      std::vector<std::size_t> order(users.begin(), users.end());
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pb.mean_g(a, m) < pb.mean_g(b, m);
      });
      std::vector<double> P = column_p(state, m);
      std::vector<double> Qv;
      if (pair != kNoPair) Qv = column_q(state, m, pair);
      for (std::size_t k : order) {
        const double theta = cfg.theta.at(k);
        const double borrowed = pair != kNoPair ? band_ec(bb, k, Qv, theta, scratch) : 0.0;
        const double need = (R - borrowed) * (1.0 + 1e-10);
        if (need <= 0.0 || band_ec(nb, k, P, theta, scratch) >= need) continue;
        const double p0 = P[k];
        P[k] = P_max;
        if (band_ec(nb, k, P, theta, scratch) < need) {
          P[k] = p0;
          continue;
        }
        double lo = std::log(std::max(p0, P_max * 1e-15)), hi = std::log(P_max);
        for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
          const double mid = 0.5 * (lo + hi);
          P[k] = std::exp(mid);
          (band_ec(nb, k, P, theta, scratch) >= need ? hi : lo) = mid;
        }
        P[k] = std::exp(hi);
        state.p_at(k, m) = P[k];
        ++tr.rate_repairs;
      }
    }

    // Budget repair: scale user powers down if the round overshot.
    double user_power = 0.0;
    for (std::size_t k : users) {
      user_power += state.p_at(k, m);
      if (pair != kNoPair) user_power += state.q_at(k, m, pair);
    }
    const double fixed = pair != kNoPair ? state.Q_at(m, pair) : 0.0;
    if (user_power + fixed > P_max && user_power > 0.0 && P_max > fixed) {
      const double f = (P_max - fixed) / user_power * (1.0 - 1e-12);
      for (std::size_t k : users) {
        state.p_at(k, m) *= f;
        if (pair != kNoPair) state.q_at(k, m, pair) *= f;
      }
      ++tr.budget_repairs;
    }

    cur = evaluate();
    if (!std::isfinite(cur.objective)) {
      throw std::runtime_error("solve_rrh: objective diverged at RRH " + std::to_string(m) +
                               " round " + std::to_string(t));
    }
    const double root = std::sqrt(static_cast<double>(t));
    for (std::size_t k : users) {
      const double v = mult.mu_at(k, m) - settings.beta1 / root * (cur.user_ec[k] - cfg.R_fronthaul.at(m));
      mult.mu_at(k, m) = std::max(0.0, v);
    }
    if (!settings.omega_bisection) {
      mult.omega[m] = std::max(0.0, mult.omega[m] + settings.beta2 / root * (cur.usage - P_max));
    }

    tr.objective.push_back(cur.objective);
    tr.omega.push_back(mult.omega[m]);
    tr.rounds = t;
    const double tol = settings.inner_tol * std::max(1.0, std::abs(cur.objective));
    if (cur.objective < prev - 10.0 * tol) ++tr.monotone_violations;
    if (cur.feasible && (!have_best || better(cur, best_eval))) {
      best = take(state, mult, m, pair);
      best_eval = cur;
      have_best = true;
      last_gain = t;
    }
    // Rounds can cycle when a rate target is out of reach; the best round is
    // kept, so stop once it has not changed for a while.
    if (t - last_gain >= settings.stall_rounds) break;
    if (t >= settings.min_inner_iters && std::abs(cur.objective - prev) <= tol &&
        cur.shortfall <= slack) {
      tr.converged = true;
      break;
    }
    prev = cur.objective;
  }

  if (have_best) {
    restore(best, state, mult, m, pair);
    cur = best_eval;
  }
  out.objective = cur.objective;
  out.ec = cur.ec;
  out.borrowed_ec = cur.borrowed_ec;
  out.usage = cur.usage;
  out.feasible = have_best;
  out.rates_met = cur.shortfall <= slack;
  out.shortfall = cur.shortfall;
  return out;
}

// Sums the counters of `from` into `into`, leaving the per-solve fields.
void add_counts(InnerTrace& into, const InnerTrace& from) {
  into.rounds += from.rounds;
  into.flagged_powers += from.flagged_powers;
  into.fallback_powers += from.fallback_powers;
  into.flagged_bandwidths += from.flagged_bandwidths;
  into.monotone_violations += from.monotone_violations;
  into.budget_repairs += from.budget_repairs;
  into.rate_repairs += from.rate_repairs;
}

// Cold start: the equal split plus one start per choice of dominant user
// on each band, since the SINR model admits stationary points where weak
// and strong users share power evenly. Every start spends `fraction` of the
// budget.
RrhOutcome multi_start(const Problem& pb, std::size_t m, std::size_t pair, double q,
                       const SolverSettings& settings, double fraction,
                       AllocationState& state, DualMultipliers& mult) {
  const auto& users = pb.users_of(m);
  std::vector<std::pair<std::size_t, std::size_t>> starts{{kNoPair, kNoPair}};
  if (users.size() > 1) {
    for (std::size_t kn : users) {
      if (pair == kNoPair) {
        starts.emplace_back(kn, kNoPair);
      } else {
        for (std::size_t kb : users) starts.emplace_back(kn, kb);
      }
    }
  }

  const DualMultipliers base_mult = mult;
  RrhOutcome best;
  AllocationState best_state;
  DualMultipliers best_mult;
  bool have = false;
  InnerTrace total;
  for (const auto& [kn, kb] : starts) {
    AllocationState s = state;
    initialize_rrh(pb, m, pair, s, fraction);
    DualMultipliers mu = base_mult;
    if (kn != kNoPair) {
      double sum = 0.0;
      for (std::size_t k : users) sum += s.p_at(k, m);
      for (std::size_t k : users) s.p_at(k, m) = k == kn ? sum : 1e-12 * sum;
    }
    if (kb != kNoPair) {
      double sum = 0.0;
      for (std::size_t k : users) sum += s.q_at(k, m, pair);
      for (std::size_t k : users) s.q_at(k, m, pair) = k == kb ? sum : 1e-12 * sum;
    }
    RrhOutcome o = run_rrh(pb, m, pair, q, settings, s, mu);
    add_counts(total, o.trace);
    if (!have || outcome_better(o, best)) {
      best = std::move(o);
      best_state = std::move(s);
      best_mult = std::move(mu);
      have = true;
    }
  }
  state = std::move(best_state);
  mult = std::move(best_mult);
  total.objective = best.trace.objective;
  total.omega = best.trace.omega;
  total.converged = best.trace.converged;
  best.trace = std::move(total);
  return best;
}

}  // namespace

RrhOutcome solve_rrh(const Problem& pb, std::size_t m, std::size_t pair, double q,
                     const SolverSettings& settings, AllocationState& state,
                     DualMultipliers& mult, bool restart) {
  const std::size_t K = pb.K(), Z = pb.Z();

  // Bring RRH m's slice in line with the requested pair.
  bool reinit = false;
  for (std::size_t k = 0; k < K; ++k) {
    const bool served = pb.serving_rrh(k) == m;
    if (!served) state.p_at(k, m) = 0.0;
    for (std::size_t z = 0; z < Z; ++z) {
      if (z != pair || !served) state.q_at(k, m, z) = 0.0;
    }
    if (served && !(state.p_at(k, m) > 0.0)) reinit = true;
    if (served && pair != kNoPair && !(state.q_at(k, m, pair) > 0.0)) reinit = true;
  }
  for (std::size_t z = 0; z < Z; ++z) {
    if (z == pair) continue;
    state.w_at(m, z) = 0.0;
    state.Q_at(m, z) = 0.0;
  }
  if (pair != kNoPair && !(state.w_at(m, pair) > 0.0)) reinit = true;

  if (reinit) return multi_start(pb, m, pair, q, settings, 1.0, state, mult);
  if (!restart) return run_rrh(pb, m, pair, q, settings, state, mult);

  // Once q > 0 the budget need not bind, and starting from half of it
  // reaches basins the full-budget path misses.

  AllocationState cold_state = state;
  DualMultipliers cold_mult = mult;
  RrhOutcome warm = run_rrh(pb, m, pair, q, settings, state, mult);
  RrhOutcome cold = multi_start(pb, m, pair, q, settings, 0.5, cold_state, cold_mult);
  if (!outcome_better(cold, warm)) {
    add_counts(warm.trace, cold.trace);
    return warm;
  }
  add_counts(cold.trace, warm.trace);
  state = std::move(cold_state);
  mult = std::move(cold_mult);
  return cold;
}

double subtractive_objective(const Problem& pb, const AllocationState& state,
                             const Assignment& x, double q) {
  AllocationState s = state;
  for (std::size_t m = 0; m < pb.M(); ++m)
    for (std::size_t z = 0; z < pb.Z(); ++z)
      s.Q_at(m, z) = x(z, m) ? pb.mbs_power(m, z, s.w_at(m, z)) : 0.0;
  double ec = 0.0;
  for (double v : exact_user_ec(pb, s, x)) ec += v;
  return ec - q * total_power(s, x, pb.cfg()).total;
}

InnerResult solve_inner(const Problem& pb, const Assignment& x, double q,
                        const SolverSettings& settings,
                        const AllocationState* warm_state,
                        const DualMultipliers* warm_mult) {
  if (!x.is_one_to_one() || x.Z() != pb.Z() || x.M() != pb.M()) {
    throw std::invalid_argument("solve_inner: assignment must be one-to-one and sized Z x M");
  }
  InnerResult res;
  // A zeroed state makes every RRH take the multi-start path.
  res.state = warm_state ? *warm_state : AllocationState(pb.K(), pb.M(), pb.Z());
  res.mult = warm_mult ? *warm_mult : DualMultipliers(pb.K(), pb.M(), pb.Z());
  for (std::size_t m = 0; m < pb.M(); ++m) {
    const RrhOutcome o = solve_rrh(pb, m, pair_of(x, m), q, settings, res.state, res.mult);
    res.traces.push_back(o.trace);
    res.feasible = res.feasible && o.feasible;
    res.converged = res.converged && o.trace.converged;
  }
  res.user_ec = exact_user_ec(pb, res.state, x);
  res.ec = 0.0;
  for (double v : res.user_ec) res.ec += v;
  res.power = total_power(res.state, x, pb.cfg()).total;
  res.objective = res.ec - q * res.power;
  res.c1_residual.resize(pb.K());
  for (std::size_t k = 0; k < pb.K(); ++k)
    res.c1_residual[k] = res.user_ec[k] - pb.cfg().R_fronthaul.at(pb.serving_rrh(k));
  return res;
}

}  // namespace hcran
