#include "hcran/band.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hcran/numerics.hpp"

namespace hcran {

using numerics::kLn2;

BandChannel::BandChannel(std::size_t N, std::size_t K, std::vector<double> gains,
                         double bandwidth, double N0, double T_f)
    : N_(N), K_(K), bandwidth_(bandwidth), N0_(N0), T_f_(T_f),
      gain_(std::move(gains)), order_(N * K), rank_(N * K) {
  if (gain_.size() != N * K) throw std::invalid_argument("BandChannel: gain size");
  std::vector<std::uint32_t> idx(K);
  for (std::size_t n = 0; n < N; ++n) {
    std::iota(idx.begin(), idx.end(), 0u);
    const double* g = gain_.data() + n * K;
    std::stable_sort(idx.begin(), idx.end(),
                     [g](std::uint32_t a, std::uint32_t b) { return g[a] > g[b]; });
    for (std::size_t r = 0; r < K; ++r) {
      order_[n * K + r] = idx[r];
      rank_[n * K + idx[r]] = static_cast<std::uint32_t>(r);
    }
  }
}

BandChannel BandChannel::native(const ChannelSampleSet& s,
                                const ScenarioConfig& cfg, std::size_t m) {
  std::vector<double> gains(s.N() * s.K());
  for (std::size_t n = 0; n < s.N(); ++n)
    for (std::size_t k = 0; k < s.K(); ++k) gains[n * s.K() + k] = s.g(n, k, m);
  return BandChannel(s.N(), s.K(), std::move(gains), cfg.B, cfg.N0, cfg.T_f);
}

BandChannel BandChannel::borrowed(const ChannelSampleSet& s,
                                  const ScenarioConfig& cfg, std::size_t m,
                                  std::size_t z, double bandwidth) {
  std::vector<double> gains(s.N() * s.K());
  for (std::size_t n = 0; n < s.N(); ++n)
    for (std::size_t k = 0; k < s.K(); ++k) gains[n * s.K() + k] = s.h(n, k, m, z);
  return BandChannel(s.N(), s.K(), std::move(gains), bandwidth, cfg.N0, cfg.T_f);
}

void BandChannel::interferer_power(std::span<const double> powers,
                                   std::span<double> out) const {
  for (std::size_t n = 0; n < N_; ++n) {
    double tail = 0.0;
    for (std::size_t r = K_; r-- > 0;) {
      const std::uint32_t k = order_[n * K_ + r];
      out[n * K_ + k] = tail;
      tail += powers[k];
    }
  }
}

double BandChannel::sinr(std::size_t n, std::size_t k,
                         std::span<const double> powers) const {
  const std::uint32_t r0 = rank_[n * K_ + k];
  double tail = 0.0;
  for (std::size_t r = r0 + 1; r < K_; ++r) tail += powers[order_[n * K_ + r]];
  const double g = gain(n, k);
  return powers[k] * g / (tail * g + noise());
}

void BandChannel::rates(std::size_t k, std::span<const double> powers,
                        std::span<double> out) const {
  const double scale = bandwidth_ * T_f_;
  for (std::size_t n = 0; n < N_; ++n) {
    out[n] = scale > 0.0 ? scale * std::log1p(sinr(n, k, powers)) / kLn2 : 0.0;
  }
}

namespace {

// Per-sample exponent -sigma * rho_kn of the bounded EC kernel, given the
// interferer powers S (N*K) for the current power vector.
void kernel_exponents(const BandChannel& band, std::size_t k,
                      std::span<const double> powers, std::span<const double> S,
                      const BandTerms& t, std::span<double> out) {
  const double sigma = t.theta[k] * band.bandwidth() * band.T_f();
  const double slope = t.slope[k];
  const double icpt = t.intercept[k];
  const std::size_t K = band.K();
  for (std::size_t n = 0; n < band.N(); ++n) {
    double rho = icpt;
    if (slope != 0.0) {
      const double g = band.gain(n, k);
      const double gamma = powers[k] * g / (S[n * K + k] * g + band.noise());
      rho += slope * std::log2(gamma);
    }
    out[n] = -sigma * rho;
  }
}

double ec_from_exponents(std::span<const double> x, double theta) {
  return -numerics::log_mean_exp(x) / theta;
}

// Softmax weights of the kernel exponents.
void softmax(std::span<double> x) {
  const double top = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double& v : x) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : x) v /= sum;
}

struct Scratch {
  std::vector<double> S, x;
  explicit Scratch(const BandChannel& b) : S(b.N() * b.K()), x(b.N()) {}
};

double price_with(const BandChannel& band, std::size_t j,
                  std::span<const double> powers, const BandTerms& t,
                  Scratch& sc) {
  band.interferer_power(powers, sc.S);
  const std::size_t K = band.K();
  const double bwT = band.bandwidth() * band.T_f();
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (k == j || t.slope[k] == 0.0 || !(powers[k] > 0.0)) continue;
    kernel_exponents(band, k, powers, sc.S, t, sc.x);
    softmax(sc.x);
    double acc = 0.0;
    for (std::size_t n = 0; n < band.N(); ++n) {
      if (band.rank_of(n, j) <= band.rank_of(n, k)) continue;
      const double g = band.gain(n, k);
      acc += sc.x[n] * g / (sc.S[n * K + k] * g + band.noise());
    }
    total += t.weight[k] * bwT * t.slope[k] / kLn2 * acc;
  }
  return total;
}

}  // namespace

double surrogate_ec(const BandChannel& band, std::size_t k,
                    std::span<const double> powers, const BandTerms& terms) {
  if (band.bandwidth() <= 0.0) return 0.0;
  Scratch sc(band);
  band.interferer_power(powers, sc.S);
  kernel_exponents(band, k, powers, sc.S, terms, sc.x);
  return ec_from_exponents(sc.x, terms.theta[k]);
}

double band_lagrangian(const BandChannel& band, std::span<const double> powers,
                       const BandTerms& terms, std::span<const double> prices) {
  Scratch sc(band);
  band.interferer_power(powers, sc.S);
  double total = 0.0;
  for (std::size_t k = 0; k < band.K(); ++k) {
    if (terms.slope[k] != 0.0 || terms.intercept[k] != 0.0) {
      if (band.bandwidth() > 0.0) {
        kernel_exponents(band, k, powers, sc.S, terms, sc.x);
        total += terms.weight[k] * ec_from_exponents(sc.x, terms.theta[k]);
      }
    }
    total -= prices[k] * powers[k];
  }
  return total;
}

double interference_price(const BandChannel& band, std::size_t j,
                          std::span<const double> powers,
                          const BandTerms& terms) {
  Scratch sc(band);
  return price_with(band, j, powers, terms, sc);
}

double exponential_form_power(double log_Theta, double log_Gamma, double sigma,
                              double slope, double intercept) {
  const double num = log_Theta + sigma * (slope * log_Gamma / kLn2 + intercept);
  return std::exp(num / (-1.0 - sigma * slope / kLn2));
}

PowerUpdate closed_form_power(const BandChannel& band, std::size_t j,
                              std::span<const double> powers,
                              const BandTerms& terms, double price, double cap) {
  PowerUpdate out;
  const double bwT = band.bandwidth() * band.T_f();
  const double slope = terms.slope[j];
  out.sigma = terms.theta[j] * bwT;
  out.own_marginal = terms.weight[j] * bwT * slope / kLn2;
  if (!std::isfinite(price)) {
    out.zero = true;
    out.boundary = true;
    out.power = 0.0;
    return out;
  }
  if (!(out.own_marginal > 0.0) || !(cap > 0.0)) {
    out.zero = true;
    out.power = 0.0;
    return out;
  }
  const double A = out.own_marginal;

  std::vector<double> P(powers.begin(), powers.end());
  Scratch sc(band);
  auto pi_at = [&](double p) {
    P[j] = p;
    ++out.evaluations;
    return price_with(band, j, P, terms, sc);
  };
  auto h = [&](double x) {
    const double p = std::exp(x);
    return A - p * (price + pi_at(p));
  };

  const double x_cap = std::log(cap);
  const double h_cap = h(x_cap);
  double p_star = cap;
  if (h_cap >= 0.0) {
    out.interference = pi_at(cap);
    if (price + out.interference > 0.0) {
      out.clipped = true;
    } else {
      out.boundary = true;
    }
  } else {
    const double current = powers[j] > 0.0 ? powers[j] : cap;
    const double denom = price + pi_at(std::min(current, cap));
    double x_guess = denom > 0.0 ? std::log(std::min(cap, A / denom)) : x_cap;
    double x_lo = x_guess;
    double x_hi = x_cap;
    double h_guess = h(x_guess);
    if (h_guess < 0.0) {
      x_hi = x_guess;
      x_lo = x_guess - std::log(10.0);
      for (int i = 0; i < 80 && h(x_lo) < 0.0; ++i) {
        x_hi = x_lo;
        x_lo -= std::log(10.0);
      }
    } else if (h_guess == 0.0) {
      x_hi = x_lo = x_guess;
    }
    if (x_hi > x_lo) {
      const double ftol = 1e-13 * A;
      auto dh = [&](double x) {
        const double e = 1e-6;
        return (h(x + e) - h(x - e)) / (2.0 * e);
      };
      auto r = numerics::safeguarded_newton(h, dh, x_lo, x_hi, x_guess, ftol,
                                            1e-15, 200);
      p_star = std::exp(r.x);
    } else {
      p_star = std::exp(x_lo);
    }
    out.interference = pi_at(p_star);
  }
  out.power = p_star;

  // Closed-form diagnostics at p_star: delta is the sample mean of the
  // bounded EC kernel, Gamma the certainty-equivalent normalised gain.
  P[j] = p_star;
  band.interferer_power(P, sc.S);
  kernel_exponents(band, j, P, sc.S, terms, sc.x);
  out.log_delta = numerics::log_mean_exp(sc.x);
  const double c = price + out.interference;
  out.log_Theta = c > 0.0 ? out.log_delta + std::log(c / A)
                          : -std::numeric_limits<double>::infinity();
  const std::size_t K = band.K();
  const double expo = out.sigma * slope / kLn2;
  std::vector<double> lg(band.N());
  for (std::size_t n = 0; n < band.N(); ++n) {
    const double g = band.gain(n, j);
    lg[n] = std::log(g / (sc.S[n * K + j] * g + band.noise()));
  }
  if (expo > 1e-12) {
    for (double& v : lg) v *= -expo;
    out.log_Gamma = -numerics::log_mean_exp(lg) / expo;
  } else {
    out.log_Gamma = numerics::mean(lg);
  }
  return out;
}

double numeric_power(const BandChannel& band, std::size_t j,
                     std::span<const double> powers, const BandTerms& terms,
                     double price, double cap) {
  if (!(terms.slope[j] > 0.0) || !(cap > 0.0) || band.bandwidth() <= 0.0) return 0.0;
  std::vector<double> P(powers.begin(), powers.end());
  std::vector<double> prices(band.K(), 0.0);
  prices[j] = price;
  auto L = [&](double x) {
    P[j] = std::exp(x);
    return band_lagrangian(band, P, terms, prices);
  };
  const double hi = std::log(cap);
  const double lo = hi - 40.0;
  auto r = numerics::golden_section_max(L, lo, hi, 1e-10, 400);
  return std::exp(r.x);
}

}  // namespace hcran
