#include "hcran/sca.hpp"

#include <cmath>
#include <stdexcept>

#include "hcran/numerics.hpp"

namespace hcran {

LogBound log_bound_at(double zbar) {
  if (!(zbar > 0.0)) return {};
  if (!std::isfinite(zbar)) return {1.0, 0.0};
  LogBound c;
  c.slope = zbar / (1.0 + zbar);
  // log2(1+z) - a log2(z) = log2(1 + 1/z) + log2(z) / (1 + z)
  c.intercept = std::log1p(1.0 / zbar) / numerics::kLn2 + std::log2(zbar) / (1.0 + zbar);
  return c;
}

double bound_rate(double z, const LogBound& c) {
  if (c.slope == 0.0) return c.intercept;
  return c.slope * std::log2(z) + c.intercept;
}

ScaConstants refresh_constants(const std::vector<double>& gamma_bar,
                               const std::vector<double>& nu_bar, std::size_t K,
                               std::size_t M, std::size_t Z) {
  if (gamma_bar.size() != K * M || nu_bar.size() != K * M * Z) {
    throw std::invalid_argument("refresh_constants: size mismatch");
  }
  ScaConstants c(K, M, Z);
  for (std::size_t i = 0; i < K * M; ++i) {
    const LogBound b = log_bound_at(gamma_bar[i]);
    c.alpha[i] = b.slope;
    c.beta[i] = b.intercept;
  }
  for (std::size_t i = 0; i < K * M * Z; ++i) {
    const LogBound b = log_bound_at(nu_bar[i]);
    c.kappa[i] = b.slope;
    c.xi[i] = b.intercept;
  }
  return c;
}

}  // namespace hcran
