#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trailrec/preprocess.hpp"
#include "trailrec/solver.hpp"
#include "trailrec/trail.hpp"
#include "trailrec/transition.hpp"

namespace trailrec {

struct RecoverOptions {
  Strategy strategy = Strategy::exact;
  std::uint64_t exact_budget = kDefaultExactBudget;
  /// Hand over-budget exact instances to ACS instead of reporting them.
  bool exact_fallback_to_acs = true;
  /// ACS settings; the seed field is replaced by a per-run derived seed.
  AcsParams acs;
  /// Master seed for ACS and random runs.
  std::uint64_t seed = 0;
  /// Phase-1 settings applied to raw (unprepared) input.
  PrepareOptions prepare;
};

enum class RunStatus { ok, infeasible, budget_exceeded, failed };

std::string_view to_string(RunStatus status);
RunStatus parse_run_status(std::string_view text);

/// Outcome of one broken run. When the solver could not produce an
/// ordering (status budget_exceeded / failed) the stored order is kept.
struct RunRecovery {
  RunOrdering recovered;
  RecoveryResult result;
  RunStatus status = RunStatus::ok;
  bool fell_back = false;
  std::string message;
};

struct TrailRecovery {
  Trail repaired;
  std::vector<RunRecovery> runs;
};

/// Dispatches one instance to the requested solver, applying the fallback
/// rule. Never throws for solver-side failures.
RunRecovery solve_instance(const SolverInstance& instance, const RecoverOptions& options,
                           std::uint64_t run_seed);

/// Solves every broken run of one prepared trail independently and rewrites
/// the run records in recovered order (timestamps are unchanged).
/// `trail_seed` seeds the stochastic solvers, one derived stream per run.
TrailRecovery recover_trail(const Trail& trail, const TransitionNetwork& net, const RecoverOptions& options,
                            std::uint64_t trail_seed = 0);

struct DatasetRecovery {
  /// Same shape as the input: raw input yields repaired raw trails.
  Dataset repaired;
  /// Ordered by trail, then run index.
  std::vector<RunRecovery> runs;
};

/// Recovers all trails in parallel. Raw datasets are prepared with
/// options.prepare first; run indices count runs per original trail.
DatasetRecovery recover_dataset(const Dataset& data, const TransitionNetwork& net,
                                const RecoverOptions& options);

/// Single-threaded reference for recover_dataset().
DatasetRecovery recover_dataset_serial(const Dataset& data, const TransitionNetwork& net,
                                       const RecoverOptions& options);

}  // namespace trailrec
