#include "hcran/baselines.hpp"

#include <chrono>
#include <stdexcept>

namespace hcran {

SolveReport solve_eee_max(const Problem& pb, const SolverSettings& settings) {
  SolveReport r = run(pb, settings, Matcher::stable);
  r.scheme = "eee_max";
  return r;
}

SolveReport solve_no_cooperation(const Problem& pb, const SolverSettings& settings) {
  SolveReport r = run(pb, settings, Matcher::none);
  r.scheme = "no_coop";
  return r;
}

SolveReport solve_greedy(const Problem& pb, const SolverSettings& settings) {
  SolveReport r = run(pb, settings, Matcher::greedy);
  r.scheme = "greedy";
  return r;
}

SolveReport solve_ec_max(const Problem& pb, const SolverSettings& settings) {
  settings.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PairCache cache(pb);
  FEvaluation ev = evaluate_F(0.0, pb, settings, cache, Matcher::stable);
  SolveReport r;
  r.scheme = "ec_max";
  r.seed = pb.cfg().seed;
  r.iterations = 1;
  r.converged = true;
  r.feasible = ev.feasible;
  r.inner = ev.stats;
  r.match_rounds = ev.match_rounds;
  DinkelbachStep step;
  step.iteration = 1;
  step.F = ev.F;
  step.ec = ev.ec;
  step.power = ev.power;
  step.pairs = ev.x.pair_count();
  r.history.push_back(step);
  r.F_final = ev.F;
  fill_report(r, pb, ev.state, ev.x);
  r.q_final = r.eee;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SolveReport solve_exhaustive_assignment(const Problem& pb, const SolverSettings& settings) {
  if (pb.Z() > settings.max_exhaustive || pb.M() > settings.max_exhaustive) {
    throw std::invalid_argument("exhaustive assignment search is limited to Z, M <= " +
                                std::to_string(settings.max_exhaustive));
  }
  const auto t0 = std::chrono::steady_clock::now();
  PairCache cache(pb);
  SolveReport best;
  bool have = false;
  std::size_t searched = 0;
  InnerStats stats;
  for (const Assignment& x : enumerate_assignments(pb.Z(), pb.M())) {
    SolveReport r = run_with_cache(pb, settings, cache, Matcher::fixed, &x);
    ++searched;
    stats.rounds += r.inner.rounds;
    stats.flagged_powers += r.inner.flagged_powers;
    stats.fallback_powers += r.inner.fallback_powers;
    stats.flagged_bandwidths += r.inner.flagged_bandwidths;
    stats.monotone_violations += r.inner.monotone_violations;
    stats.budget_repairs += r.inner.budget_repairs;
    stats.rate_repairs += r.inner.rate_repairs;
    stats.solves += r.inner.solves;
    stats.unconverged += r.inner.unconverged;
    if (!r.feasible) continue;
    if (!have || r.eee > best.eee) {
      best = std::move(r);
      have = true;
    }
  }
  if (!have) throw std::runtime_error("exhaustive search found no feasible assignment");
  best.scheme = "exhaustive";
  best.assignments_searched = searched;
  best.inner = stats;
  best.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return best;
}

const std::vector<std::string>& scheme_names() {
  static const std::vector<std::string> names{"eee_max", "ec_max", "no_coop", "exhaustive",
                                              "greedy"};
  return names;
}

SolveReport solve_scheme(const std::string& scheme, const Problem& pb,
                         const SolverSettings& settings) {
  if (scheme == "eee_max") return solve_eee_max(pb, settings);
  if (scheme == "ec_max") return solve_ec_max(pb, settings);
  if (scheme == "no_coop") return solve_no_cooperation(pb, settings);
  if (scheme == "exhaustive") return solve_exhaustive_assignment(pb, settings);
  if (scheme == "greedy") return solve_greedy(pb, settings);
  throw std::invalid_argument("unknown scheme '" + scheme + "'");
}

}  // namespace hcran
