#pragma once

#include <string>
#include <vector>

#include "hcran/dinkelbach.hpp"

namespace hcran {

/// Proposed scheme: Dinkelbach with stable matching ("eee_max").
SolveReport solve_eee_max(const Problem& pb, const SolverSettings& settings);

/// No MBS user is served; native-band powers only ("no_coop").
SolveReport solve_no_cooperation(const Problem& pb, const SolverSettings& settings);

/// q pinned to 0: pure EC maximisation, EEE reported for the result ("ec_max").
SolveReport solve_ec_max(const Problem& pb, const SolverSettings& settings);

/// Full Dinkelbach for every one-to-one assignment; best EEE wins
/// ("exhaustive"). Refuses Z or M above settings.max_exhaustive.
SolveReport solve_exhaustive_assignment(const Problem& pb, const SolverSettings& settings);

/// Dinkelbach with the per-RRH greedy matcher ("greedy").
SolveReport solve_greedy(const Problem& pb, const SolverSettings& settings);

const std::vector<std::string>& scheme_names();

/// Dispatch by scheme name; throws std::invalid_argument for unknown names.
SolveReport solve_scheme(const std::string& scheme, const Problem& pb,
                         const SolverSettings& settings);

}  // namespace hcran
