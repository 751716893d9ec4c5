#include "hcran/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

namespace hcran {

std::vector<std::size_t> Assignment::served_by(std::size_t m) const {
  std::vector<std::size_t> out;
  for (std::size_t z = 0; z < Z_; ++z)
    if ((*this)(z, m)) out.push_back(z);
  return out;
}

std::size_t Assignment::rrh_of(std::size_t z) const {
  for (std::size_t m = 0; m < M_; ++m)
    if ((*this)(z, m)) return m;
  return M_;
}

std::size_t Assignment::pair_count() const {
  return static_cast<std::size_t>(std::count(x_.begin(), x_.end(), 1));
}

bool Assignment::is_one_to_one() const {
  for (std::size_t z = 0; z < Z_; ++z) {
    std::size_t row = 0;
    for (std::size_t m = 0; m < M_; ++m) row += (*this)(z, m) ? 1 : 0;
    if (row > 1) return false;
  }
  for (std::size_t m = 0; m < M_; ++m)
    if (served_by(m).size() > 1) return false;
  return true;
}

MatchResult stable_match(const UtilityMatrix& U) {
  const std::size_t Z = U.Z(), M = U.M();
  for (std::size_t z = 0; z < Z; ++z)
    for (std::size_t m = 0; m < M; ++m)
      if (!std::isfinite(U(z, m)) && !(U(z, m) < 0.0)) {
        throw std::invalid_argument("stable_match: utilities must be finite or -inf");
      }
  std::vector<std::tuple<double, std::size_t, std::size_t>> entries;
  entries.reserve(Z * M);
  for (std::size_t z = 0; z < Z; ++z)
    for (std::size_t m = 0; m < M; ++m)
      if (U(z, m) > 0.0) entries.emplace_back(U(z, m), z, m);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });
  MatchResult out{Assignment(Z, M), 0};
  std::vector<char> row_used(Z, 0), col_used(M, 0);
  const std::size_t limit = std::min(Z, M);
  for (const auto& [u, z, m] : entries) {
    if (out.rounds == limit) break;
    if (row_used[z] || col_used[m]) continue;
    out.x.set(z, m, true);
    row_used[z] = col_used[m] = 1;
    ++out.rounds;
  }
  return out;
}

Assignment greedy_match(const UtilityMatrix& U) {
  Assignment x(U.Z(), U.M());
  std::vector<char> taken(U.Z(), 0);
  for (std::size_t m = 0; m < U.M(); ++m) {
    std::size_t best = U.Z();
    for (std::size_t z = 0; z < U.Z(); ++z) {
      if (taken[z] || !(U(z, m) > 0.0)) continue;
      if (best == U.Z() || U(z, m) > U(best, m)) best = z;
    }
    if (best != U.Z()) {
      x.set(best, m, true);
      taken[best] = 1;
    }
  }
  return x;
}

namespace {

void enumerate_from(std::size_t z, Assignment& cur, std::vector<char>& used,
                    std::vector<Assignment>& out) {
  if (z == cur.Z()) {
    out.push_back(cur);
    return;
  }
  enumerate_from(z + 1, cur, used, out);
  for (std::size_t m = 0; m < cur.M(); ++m) {
    if (used[m]) continue;
    used[m] = 1;
    cur.set(z, m, true);
    enumerate_from(z + 1, cur, used, out);
    cur.set(z, m, false);
    used[m] = 0;
  }
}

}  // namespace

std::vector<Assignment> enumerate_assignments(std::size_t Z, std::size_t M) {
  std::vector<Assignment> out;
  Assignment cur(Z, M);
  std::vector<char> used(M, 0);
  enumerate_from(0, cur, used, out);
  return out;
}

double total_utility(const UtilityMatrix& U, const Assignment& x) {
  double s = 0.0;
  for (std::size_t z = 0; z < U.Z(); ++z)
    for (std::size_t m = 0; m < U.M(); ++m)
      if (x(z, m)) s += U(z, m);
  return s;
}

Assignment exhaustive_match(const UtilityMatrix& U) {
  if (U.Z() > 8 || U.M() > 8) {
    throw std::invalid_argument("exhaustive_match: Z = " + std::to_string(U.Z()) +
                                ", M = " + std::to_string(U.M()) + " exceeds the limit of 8");
  }
  Assignment best(U.Z(), U.M());
  double best_u = 0.0;
  for (const Assignment& x : enumerate_assignments(U.Z(), U.M())) {
    const double u = total_utility(U, x);
    if (u > best_u) {
      best_u = u;
      best = x;
    }
  }
  return best;
}

bool has_blocking_pair(const UtilityMatrix& U, const Assignment& x) {
  std::vector<double> gets_z(U.Z(), 0.0), gets_m(U.M(), 0.0);
  for (std::size_t z = 0; z < U.Z(); ++z)
    for (std::size_t m = 0; m < U.M(); ++m)
      if (x(z, m)) gets_z[z] = gets_m[m] = U(z, m);
  for (std::size_t z = 0; z < U.Z(); ++z)
    for (std::size_t m = 0; m < U.M(); ++m)
      if (!x(z, m) && U(z, m) > gets_z[z] && U(z, m) > gets_m[m]) return true;
  return false;
}

PairCache::PairCache(const Problem& pb)
    : K_(pb.K()), M_(pb.M()), Z_(pb.Z()) {
  entries_.resize(M_ * (Z_ + 1));
  for (auto& e : entries_) {
    e.state = AllocationState(K_, M_, Z_);
    e.mult = DualMultipliers(K_, M_, Z_);
  }
}

const PairCache::Entry& PairCache::solve(const Problem& pb, std::size_t m,
                                         std::size_t pair, double q,
                                         const SolverSettings& settings) {
  Entry& e = at(m, pair);
  // The q = 0 solve spends the whole budget, so the first step away from it
  // also restarts cold rather than only following that basin.
  const bool restart = e.solved && e.q == 0.0 && q > 0.0;
  e.outcome = solve_rrh(pb, m, pair, q, settings, e.state, e.mult, restart);
  e.q = q;
  e.solved = true;
  return e;
}

void PairCache::compose(const Assignment& x, AllocationState& state,
                        DualMultipliers& mult) const {
  state = AllocationState(K_, M_, Z_);
  mult = DualMultipliers(K_, M_, Z_);
  for (std::size_t m = 0; m < M_; ++m) {
    const std::size_t pair = pair_of(x, m);
    const Entry& e = at(m, pair);
    for (std::size_t k = 0; k < K_; ++k) {
      state.p_at(k, m) = e.state.p_at(k, m);
      mult.mu_at(k, m) = e.mult.mu_at(k, m);
      if (pair != kNoPair) state.q_at(k, m, pair) = e.state.q_at(k, m, pair);
    }
    if (pair != kNoPair) {
      state.w_at(m, pair) = e.state.w_at(m, pair);
      state.Q_at(m, pair) = e.state.Q_at(m, pair);
    }
    mult.omega[m] = e.mult.omega[m];
  }
}

UtilityMatrix build_utility(const Problem& pb, double q,
                            const SolverSettings& settings, PairCache& cache) {
  UtilityMatrix U(pb.Z(), pb.M());
  for (std::size_t m = 0; m < pb.M(); ++m) {
    const double zeta = pb.cfg().power_weight(m);
    for (std::size_t z = 0; z < pb.Z(); ++z) {
      const auto& e = cache.solve(pb, m, z, q, settings);
      if (!e.outcome.feasible) {
        U(z, m) = -std::numeric_limits<double>::infinity();
        continue;
      }
      double serving = e.state.Q_at(m, z);
      for (std::size_t k = 0; k < pb.K(); ++k) serving += e.state.q_at(k, m, z);
      U(z, m) = e.outcome.borrowed_ec - q * zeta * serving;
    }
  }
  return U;
}

}  // namespace hcran
