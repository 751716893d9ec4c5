#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

namespace hcran::numerics {

inline constexpr double kLn2 = std::numbers::ln2;

/// Pairwise summation; the reduction tree depends only on the length, so
/// results are reproducible regardless of how callers chunk the work.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty range");
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

/// ln( (1/N) sum_n exp(x_n) ), shifted by max(x) and evaluated through
/// expm1/log1p so that nearly-constant inputs keep full relative precision.
inline double log_mean_exp(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("log_mean_exp of empty range");
  const double top = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double x : xs) acc += std::expm1(x - top);
  return top + std::log1p(acc / static_cast<double>(xs.size()));
}

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Newton's method with a bisection safeguard on a bracket [lo, hi] where
/// f(lo) and f(hi) have opposite signs. `df` may be a finite-difference
/// derivative; steps leaving the bracket or not shrinking fast enough fall
/// back to bisection.
template <class F, class DF>
RootResult safeguarded_newton(F&& f, DF&& df, double lo, double hi, double x0,
                              double ftol, double xtol, int max_iter = 100) {
  double flo = f(lo);
  double fhi = f(hi);
  RootResult out;
  if (flo == 0.0) return {lo, 0.0, 0, true};
  if (fhi == 0.0) return {hi, 0.0, 0, true};
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("safeguarded_newton: root not bracketed");
  }
  // orient so that f(a) < 0 < f(b)
  double a = lo, b = hi;
  if (flo > 0.0) std::swap(a, b);
  double x = std::clamp(x0, std::min(lo, hi), std::max(lo, hi));
  double fx = f(x);
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    if (std::abs(fx) <= ftol) {
      out.converged = true;
      break;
    }
    const double d = df(x);
    const bool newton_out = ((x - b) * d - fx) * ((x - a) * d - fx) > 0.0;
    const bool too_slow = std::abs(2.0 * fx) > std::abs(dx_old * d);
    dx_old = dx;
    if (d == 0.0 || !std::isfinite(d) || newton_out || too_slow) {
      dx = 0.5 * (b - a);
      x = a + dx;
    } else {
      dx = fx / d;
      x -= dx;
    }
    fx = f(x);
    if (fx < 0.0) a = x; else b = x;
    if (std::abs(b - a) <= xtol * std::max(1.0, std::abs(x))) {
      out.converged = std::abs(fx) <= ftol || std::abs(b - a) <= xtol;
      break;
    }
  }
  out.x = x;
  out.residual = fx;
  return out;
}

/// Plain bisection on a sign-changing bracket.
template <class F>
RootResult bisection(F&& f, double lo, double hi, double xtol,
                     int max_iter = 200) {
  double flo = f(lo);
  const double fhi = f(hi);
  if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0) {
    throw std::invalid_argument("bisection: root not bracketed");
  }
  RootResult out;
  double mid = 0.5 * (lo + hi);
  double fmid = f(mid);
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    mid = 0.5 * (lo + hi);
    fmid = f(mid);
    if (fmid == 0.0 || 0.5 * (hi - lo) <= xtol) break;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  out.x = mid;
  out.residual = fmid;
  out.converged = true;
  return out;
}

struct MaxResult {
  double x = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// The endpoints are also compared, so boundary maxima are found exactly.
template <class F>
MaxResult golden_section_max(F&& f, double lo, double hi, double xtol,
                             int max_iter = 300) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  MaxResult out;
  int it = 0;
  while (std::abs(b - a) > xtol && it < max_iter) {
    ++it;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  out.iterations = it;
  const double mid = 0.5 * (a + b);
  const double candidates[3] = {lo, mid, hi};
  for (double x : candidates) {
    const double v = f(x);
    if (v > out.value) {
      out.value = v;
      out.x = x;
    }
  }
  return out;
}

}  // namespace hcran::numerics
