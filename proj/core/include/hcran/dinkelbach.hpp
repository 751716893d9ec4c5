#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hcran/assignment.hpp"
#include "hcran/dualsolver.hpp"
#include "hcran/effcap.hpp"

namespace hcran {

/// How the MBS-user assignment is chosen inside each evaluation of F(q).
enum class Matcher { stable, greedy, exhaustive, none, fixed };

struct DinkelbachStep {
  int iteration = 0;
  double q = 0.0;
  double F = 0.0;
  double ec = 0.0;
  double power = 0.0;
  std::size_t pairs = 0;
  bool kept_previous = false;  ///< the previous allocation beat the new solve
};

struct InnerStats {
  long rounds = 0;
  long flagged_powers = 0;
  long fallback_powers = 0;
  long flagged_bandwidths = 0;
  long monotone_violations = 0;
  long budget_repairs = 0;
  long rate_repairs = 0;
  long solves = 0;
  long unconverged = 0;
};

struct FEvaluation {
  double q = 0.0;
  double F = 0.0;
  double ec = 0.0;
  double power = 0.0;
  bool feasible = true;
  AllocationState state;
  DualMultipliers mult;
  Assignment x;
  UtilityMatrix U;
  std::size_t match_rounds = 0;
  InnerStats stats;
};

/// F(q) = max EC - q P_T: utilities from single-pair solves, assignment by
/// `matcher`, then the per-RRH solutions for that assignment.
FEvaluation evaluate_F(double q, const Problem& pb, const SolverSettings& settings,
                       PairCache& cache, Matcher matcher,
                       const Assignment* fixed = nullptr);

struct ConstraintResiduals {
  std::vector<double> c1;  ///< E_k - R_m on the serving RRH, bits/frame
  std::vector<double> c2;  ///< per served pair: MBS-user rate - R_z, bits/frame
  std::vector<double> c4;  ///< P_max - usage per RRH, W
  double c8 = 0.0;         ///< max p_{k,m} p_{k,m'}, W^2
};

struct SolveReport {
  std::string scheme;
  std::uint64_t seed = 0;
  bool converged = false;
  bool approximate = false;
  bool feasible = true;
  bool rates_met = true;  ///< every user reaches its fronthaul rate target
  int iterations = 0;
  double eee = 0.0;
  double q_final = 0.0;
  double F_final = 0.0;
  double total_ec = 0.0;
  std::vector<double> user_ec;
  std::vector<double> user_ec_stderr;
  PowerBreakdown power;
  Assignment assignment;
  AllocationState state;
  std::vector<DinkelbachStep> history;
  ConstraintResiduals residuals;
  InnerStats inner;
  std::size_t match_rounds = 0;
  std::size_t assignments_searched = 0;
  double wall_time_s = 0.0;
  std::string error;
};

/// Fills EC, power, residuals and EEE for an allocation.
void fill_report(SolveReport& r, const Problem& pb, const AllocationState& state,
                 const Assignment& x);

/// Dinkelbach loop: q0 = 0, then q <- EC/P_T of the achieving allocation
/// until F(q) < eps or the iteration cap.
SolveReport run(const Problem& pb, const SolverSettings& settings,
                Matcher matcher = Matcher::stable, const Assignment* fixed = nullptr);

/// Same, reusing a caller-owned cache of per-RRH warm starts.
SolveReport run_with_cache(const Problem& pb, const SolverSettings& settings,
                           PairCache& cache, Matcher matcher,
                           const Assignment* fixed = nullptr);

}  // namespace hcran
