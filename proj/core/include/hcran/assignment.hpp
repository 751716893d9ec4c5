#pragma once

#include <cstddef>
#include <vector>

#include "hcran/dualsolver.hpp"
#include "hcran/state.hpp"

namespace hcran {

/// u[z][m]: bits/frame of borrowed-band EC minus q-weighted serving power.
class UtilityMatrix {
 public:
  UtilityMatrix() = default;
  UtilityMatrix(std::size_t Z, std::size_t M, double fill = 0.0)
      : Z_(Z), M_(M), u_(Z * M, fill) {}

  std::size_t Z() const { return Z_; }
  std::size_t M() const { return M_; }
  double& operator()(std::size_t z, std::size_t m) { return u_[z * M_ + m]; }
  double operator()(std::size_t z, std::size_t m) const { return u_[z * M_ + m]; }

  bool operator==(const UtilityMatrix&) const = default;

 private:
  std::size_t Z_ = 0, M_ = 0;
  std::vector<double> u_;
};

struct MatchResult {
  Assignment x;
  std::size_t rounds = 0;  ///< selections made
};

/// Repeatedly fixes the largest remaining positive entry and deletes its row
/// and column. Ties go to the lower z, then the lower m.
MatchResult stable_match(const UtilityMatrix& U);

/// Each RRH in index order takes its best free MBS user with positive utility.
Assignment greedy_match(const UtilityMatrix& U);

/// Best one-to-one partial assignment by enumeration; Z and M must be <= 8.
Assignment exhaustive_match(const UtilityMatrix& U);

/// Every one-to-one partial assignment, the empty one first.
std::vector<Assignment> enumerate_assignments(std::size_t Z, std::size_t M);

double total_utility(const UtilityMatrix& U, const Assignment& x);

/// True if some pair (z, m) has utility above what both z and m receive.
bool has_blocking_pair(const UtilityMatrix& U, const Assignment& x);

/// Per-RRH solutions for every choice of served MBS user (index Z means
/// none), kept between calls as warm starts.
class PairCache {
 public:
  struct Entry {
    AllocationState state;
    DualMultipliers mult;
    RrhOutcome outcome;
    double q = 0.0;
    bool solved = false;
  };

  PairCache() = default;
  PairCache(const Problem& pb);

  Entry& at(std::size_t m, std::size_t pair) { return entries_[index(m, pair)]; }
  const Entry& at(std::size_t m, std::size_t pair) const { return entries_[index(m, pair)]; }

  /// Solves RRH m with `pair` at parameter q, warm-started from the entry.
  const Entry& solve(const Problem& pb, std::size_t m, std::size_t pair, double q,
                     const SolverSettings& settings);

  /// RRH slices of the entries selected by x, assembled into one state.
  void compose(const Assignment& x, AllocationState& state, DualMultipliers& mult) const;

 private:
  std::size_t index(std::size_t m, std::size_t pair) const {
    return m * (Z_ + 1) + (pair == kNoPair ? Z_ : pair);
  }
  std::size_t K_ = 0, M_ = 0, Z_ = 0;
  std::vector<Entry> entries_;
};

/// Utility of every (z, m) from single-pair solves at parameter q:
/// exact borrowed-band EC minus q zeta_m (sum_k q_{k,m,z} + Q_{m,z}).
UtilityMatrix build_utility(const Problem& pb, double q,
                            const SolverSettings& settings, PairCache& cache);

}  // namespace hcran
