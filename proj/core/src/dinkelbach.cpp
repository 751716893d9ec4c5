#include "hcran/dinkelbach.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hcran/noma.hpp"

namespace hcran {

namespace {

void accumulate(InnerStats& s, const InnerTrace& t) {
  s.rounds += t.rounds;
  s.flagged_powers += t.flagged_powers;
  s.fallback_powers += t.fallback_powers;
  s.flagged_bandwidths += t.flagged_bandwidths;
  s.monotone_violations += t.monotone_violations;
  s.budget_repairs += t.budget_repairs;
  s.rate_repairs += t.rate_repairs;
  s.solves += 1;
  s.unconverged += t.converged ? 0 : 1;
}

void add(InnerStats& a, const InnerStats& b) {
  a.rounds += b.rounds;
  a.flagged_powers += b.flagged_powers;
  a.fallback_powers += b.fallback_powers;
  a.flagged_bandwidths += b.flagged_bandwidths;
  a.monotone_violations += b.monotone_violations;
  a.budget_repairs += b.budget_repairs;
  a.rate_repairs += b.rate_repairs;
  a.solves += b.solves;
  a.unconverged += b.unconverged;
}

}  // namespace

FEvaluation evaluate_F(double q, const Problem& pb, const SolverSettings& settings,
                       PairCache& cache, Matcher matcher, const Assignment* fixed) {
  if (!(q >= 0.0)) throw std::invalid_argument("evaluate_F: q must be >= 0");
  FEvaluation ev;
  ev.q = q;
  const std::size_t M = pb.M(), Z = pb.Z();
  ev.x = Assignment(Z, M);
  ev.U = UtilityMatrix(Z, M);

  switch (matcher) {
    case Matcher::fixed:
      if (!fixed || !fixed->is_one_to_one() || fixed->Z() != Z || fixed->M() != M) {
        throw std::invalid_argument("evaluate_F: fixed matcher needs a one-to-one Z x M assignment");
      }
      ev.x = *fixed;
      break;
    case Matcher::none:
      break;
    case Matcher::stable:
    case Matcher::greedy:
    case Matcher::exhaustive: {
      ev.U = build_utility(pb, q, settings, cache);
      for (std::size_t m = 0; m < M; ++m)
        for (std::size_t z = 0; z < Z; ++z) accumulate(ev.stats, cache.at(m, z).outcome.trace);
      if (matcher == Matcher::stable) {
        const MatchResult mr = stable_match(ev.U);
        ev.x = mr.x;
        ev.match_rounds = mr.rounds;
      } else if (matcher == Matcher::greedy) {
        ev.x = greedy_match(ev.U);
      } else {
        ev.x = exhaustive_match(ev.U);
      }
      break;
    }
  }

  ev.F = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t pair = pair_of(ev.x, m);
    const bool prebuilt = pair != kNoPair && matcher != Matcher::fixed && matcher != Matcher::none;
    const auto& e = prebuilt ? cache.at(m, pair) : cache.solve(pb, m, pair, q, settings);
    if (!prebuilt) accumulate(ev.stats, e.outcome.trace);
    ev.F += e.outcome.objective;
    ev.feasible = ev.feasible && e.outcome.feasible;
  }
  cache.compose(ev.x, ev.state, ev.mult);
  double ec = 0.0;
  for (double v : exact_user_ec(pb, ev.state, ev.x)) ec += v;
  ev.ec = ec;
  ev.power = total_power(ev.state, ev.x, pb.cfg()).total;
  return ev;
}

void fill_report(SolveReport& r, const Problem& pb, const AllocationState& state,
                 const Assignment& x) {
  const auto& cfg = pb.cfg();
  r.state = state;
  r.assignment = x;
  r.user_ec.assign(pb.K(), 0.0);
  r.user_ec_stderr.assign(pb.K(), 0.0);
  r.total_ec = 0.0;
  for (std::size_t k = 0; k < pb.K(); ++k) {
    const EcEstimate e = user_effective_capacity(k, state, x, pb.samples(), cfg);
    r.user_ec[k] = e.value;
    r.user_ec_stderr[k] = e.std_error;
    r.total_ec += e.value;
  }
  r.power = total_power(state, x, cfg);
  r.eee = r.total_ec / r.power.total;

  ConstraintResiduals& res = r.residuals;
  res.c1.resize(pb.K());
  r.rates_met = true;
  for (std::size_t k = 0; k < pb.K(); ++k) {
    const double R = cfg.R_fronthaul.at(pb.serving_rrh(k));
    res.c1[k] = r.user_ec[k] - R;
    if (res.c1[k] < -1e-6 * std::max(1.0, R)) r.rates_met = false;
  }
  res.c2.clear();
  for (std::size_t z = 0; z < pb.Z(); ++z)
    for (std::size_t m = 0; m < pb.M(); ++m) {
      if (!x(z, m)) continue;
      // Serving power follows channel inversion across fading states, so the
      // delivered rate is the same in every state.
      const double w = state.w_at(m, z);
      const double Q = state.Q_at(m, z);
      const double rate = w * cfg.T_f * std::log2(1.0 + Q / (w * pb.mean_N0_over_H(m, z)));
      res.c2.push_back(rate - cfg.R_mbs.at(z));
    }
  res.c4.resize(pb.M());
  bool feasible = true;
  for (std::size_t m = 0; m < pb.M(); ++m) {
    res.c4[m] = cfg.P_max.at(m) - rrh_power_usage(state, x, m);
    if (res.c4[m] < -1e-9 * cfg.P_max.at(m)) feasible = false;
  }
  res.c8 = 0.0;
  for (std::size_t k = 0; k < pb.K(); ++k)
    for (std::size_t m = 0; m < pb.M(); ++m)
      for (std::size_t m2 = m + 1; m2 < pb.M(); ++m2)
        res.c8 = std::max(res.c8, state.p_at(k, m) * state.p_at(k, m2));
  r.feasible = r.feasible && feasible;
}

SolveReport run_with_cache(const Problem& pb, const SolverSettings& settings,
                           PairCache& cache, Matcher matcher, const Assignment* fixed) {
  settings.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport r;
  r.seed = pb.cfg().seed;

  double q = 0.0;
  bool have_prev = false;
  FEvaluation prev;
  FEvaluation chosen;
  for (int it = 1; it <= settings.max_outer_iters; ++it) {
    FEvaluation ev = evaluate_F(q, pb, settings, cache, matcher, fixed);
    add(r.inner, ev.stats);
    r.match_rounds = std::max(r.match_rounds, ev.match_rounds);
    DinkelbachStep step;
    step.iteration = it;
    step.q = q;
    if (have_prev && prev.feasible) {
      const double F_prev = prev.ec - q * prev.power;
      if (!ev.feasible || F_prev > ev.F) {
        ev.state = prev.state;
        ev.mult = prev.mult;
        ev.x = prev.x;
        ev.ec = prev.ec;
        ev.power = prev.power;
        ev.F = F_prev;
        ev.feasible = true;
        step.kept_previous = true;
      }
    }
    chosen = std::move(ev);
    step.F = chosen.F;
    step.ec = chosen.ec;
    step.power = chosen.power;
    step.pairs = chosen.x.pair_count();
    r.history.push_back(step);
    r.iterations = it;
    const double q_next = chosen.ec / chosen.power;
    if (q_next < q * (1.0 - 1e-12)) r.approximate = true;
    r.F_final = chosen.F;
    if (!chosen.feasible) {
      r.feasible = false;
      r.error = "no feasible allocation for the requested assignment";
      q = q_next;
      break;
    }
    if (std::abs(chosen.F) < settings.dinkelbach_eps) {
      r.converged = true;
      q = q_next;
      break;
    }
    q = q_next;
    prev = chosen;
    have_prev = true;
  }
  r.q_final = q;
  fill_report(r, pb, chosen.state, chosen.x);
  if (!r.converged) r.approximate = true;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SolveReport run(const Problem& pb, const SolverSettings& settings, Matcher matcher,
                const Assignment* fixed) {
  PairCache cache(pb);
  return run_with_cache(pb, settings, cache, matcher, fixed);
}

}  // namespace hcran
