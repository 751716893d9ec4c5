#pragma once

#include <cstddef>
#include <vector>

namespace hcran {

/// Slope and intercept of the tangent-in-log bound
///   log2(1 + z) >= slope log2(z) + intercept, tight at z = zbar.
struct LogBound {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Constants for expansion point zbar; zbar = 0 gives (0, 0).
LogBound log_bound_at(double zbar);

/// slope log2(z) + intercept.
double bound_rate(double z, const LogBound& c);

/// alpha/beta per (k, m) for native bands, kappa/xi per (k, m, z) for
/// borrowed bands, stored with the same flat layout as AllocationState.
struct ScaConstants {
  std::size_t K = 0, M = 0, Z = 0;
  std::vector<double> alpha, beta;  ///< K x M
  std::vector<double> kappa, xi;    ///< K x M x Z

  ScaConstants() = default;
  ScaConstants(std::size_t K_, std::size_t M_, std::size_t Z_)
      : K(K_), M(M_), Z(Z_), alpha(K_ * M_, 0.0), beta(K_ * M_, 0.0),
        kappa(K_ * M_ * Z_, 0.0), xi(K_ * M_ * Z_, 0.0) {}

  void set_native(std::size_t k, std::size_t m, const LogBound& c) {
    alpha[k * M + m] = c.slope;
    beta[k * M + m] = c.intercept;
  }
  void set_borrowed(std::size_t k, std::size_t m, std::size_t z, const LogBound& c) {
    kappa[(k * M + m) * Z + z] = c.slope;
    xi[(k * M + m) * Z + z] = c.intercept;
  }
  LogBound native(std::size_t k, std::size_t m) const {
    return {alpha[k * M + m], beta[k * M + m]};
  }
  LogBound borrowed(std::size_t k, std::size_t m, std::size_t z) const {
    return {kappa[(k * M + m) * Z + z], xi[(k * M + m) * Z + z]};
  }
};

/// Expansion SINRs gamma_bar (K x M) and nu_bar (K x M x Z) mapped to bounds.
ScaConstants refresh_constants(const std::vector<double>& gamma_bar,
                               const std::vector<double>& nu_bar,
                               std::size_t K, std::size_t M, std::size_t Z);

}  // namespace hcran
