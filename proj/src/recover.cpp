#include "trailrec/recover.hpp"

#include <cmath>
#include <exception>

#include <omp.h>

#include "trailrec/error.hpp"
#include "trailrec/rng.hpp"

namespace trailrec {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::budget_exceeded: return "budget_exceeded";
    case RunStatus::failed: return "failed";
  }
  return "failed";
}

RunStatus parse_run_status(std::string_view text) {
  if (text == "ok") return RunStatus::ok;
  if (text == "infeasible") return RunStatus::infeasible;
  if (text == "budget_exceeded") return RunStatus::budget_exceeded;
  if (text == "failed") return RunStatus::failed;
  throw InputError("unknown run status '" + std::string(text) + "'");
}

namespace {

RecoveryResult stored_order(const SolverInstance& instance, Strategy strategy) {
  RecoveryResult r;
  if (instance.source()) r.ordering.push_back(*instance.source());
  for (const auto& layer : instance.layers()) r.ordering.insert(r.ordering.end(), layer.begin(), layer.end());
  if (instance.target()) r.ordering.push_back(*instance.target());
  r.log_prob = r.ordering.size() >= 2 ? score_sequence(instance.net(), r.ordering) : 0.0;
  r.infeasible = std::isinf(r.log_prob);
  r.solver = strategy;
  return r;
}

}  // namespace

RunRecovery solve_instance(const SolverInstance& instance, const RecoverOptions& options,
                           std::uint64_t run_seed) {
  RunRecovery out;
  AcsParams acs = options.acs;
  acs.seed = run_seed;
  try {
    switch (options.strategy) {
      case Strategy::exact:
        try {
          out.result = solve_exact(instance, options.exact_budget);
        } catch (const BudgetExceeded& e) {
          if (!options.exact_fallback_to_acs) throw;
          out.result = solve_acs(instance, acs);
          out.fell_back = true;
          out.message = e.what();
        }
        break;
      case Strategy::acs: out.result = solve_acs(instance, acs); break;
      case Strategy::greedy: out.result = solve_greedy(instance); break;
      case Strategy::random: out.result = solve_random(instance, run_seed); break;
    }
    out.status = out.result.infeasible ? RunStatus::infeasible : RunStatus::ok;
  } catch (const BudgetExceeded& e) {
    out.result = stored_order(instance, options.strategy);
    out.status = RunStatus::budget_exceeded;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.result = stored_order(instance, options.strategy);
    out.status = RunStatus::failed;
    out.message = e.what();
  }
  return out;
}

TrailRecovery recover_trail(const Trail& trail, const TransitionNetwork& net, const RecoverOptions& options,
                            std::uint64_t trail_seed) {
  TrailRecovery out{trail, {}};
  const auto runs = detect_broken_points(trail);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    const auto instance = SolverInstance::from_run(net, trail, run);
    RunRecovery rec = solve_instance(instance, options, derive_seed(trail_seed, r));

    // Drop the endpoints, then deal the body back out slot by slot.
    const auto& ordering = rec.result.ordering;
    std::size_t pos = instance.source() ? 1 : 0;
    rec.recovered.trail_id = trail.id;
    rec.recovered.run_index = r;
    for (const auto& layer : run.layers) {
      SlotOrdering slot{layer.slot_time, {}};
      for (auto idx : layer.members) {
        const LocationId loc = ordering[pos++];
        out.repaired.records[idx].location = loc;
        slot.ordering.push_back(loc);
      }
      rec.recovered.slots.push_back(std::move(slot));
    }
    out.runs.push_back(std::move(rec));
  }
  return out;
}

namespace {

/// Recovers one input trail (raw or prepared) and maps the result back
/// onto the input's records.
TrailRecovery recover_one(const Dataset& data, std::size_t t, const TransitionNetwork& net,
                          const RecoverOptions& options) {
  const Trail& input = data.trails[t];
  const std::uint64_t trail_seed = derive_seed(options.seed, t);

  if (data.prepared) {
    auto rec = recover_trail(input, net, options, trail_seed);
    for (auto& run : rec.runs) run.recovered.trail_id = data.partitions[t].origin_id;
    return rec;
  }

  TrailRecovery out{input, {}};
  const auto parts = prepare_trail(input, options.prepare);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto rec = recover_trail(parts[p].trail, net, options, derive_seed(trail_seed, 1000003 + p));
    for (std::size_t i = 0; i < rec.repaired.records.size(); ++i) {
      const auto origin = parts[p].origin[i];
      if (origin >= 0) out.repaired.records[static_cast<std::size_t>(origin)] = rec.repaired.records[i];
    }
    for (auto& run : rec.runs) {
      run.recovered.trail_id = input.id;
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

TransitionNetwork covering_network(const Dataset& data, const TransitionNetwork& net) {
  if (net.locations().tokens() == data.locations.tokens()) return net;
  return net.extended_to(data.locations);
}

DatasetRecovery assemble(const Dataset& data, std::vector<TrailRecovery>& per_trail) {
  DatasetRecovery out;
  out.repaired.locations = data.locations;
  out.repaired.unit = data.unit;
  out.repaired.prepared = data.prepared;
  out.repaired.partitions = data.partitions;
  std::string last_id;
  std::size_t counter = 0;
  for (auto& rec : per_trail) {
    out.repaired.trails.push_back(std::move(rec.repaired));
    for (auto& run : rec.runs) {
      if (run.recovered.trail_id != last_id) {
        last_id = run.recovered.trail_id;
        counter = 0;
      }
      run.recovered.run_index = counter++;
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

void check_inputs(const Dataset& data, const RecoverOptions& options) {
  options.acs.validate();
  if (!data.prepared) options.prepare.gap.validate();
  for (const auto& trail : data.trails) validate(trail);
}

}  // namespace

DatasetRecovery recover_dataset_serial(const Dataset& data, const TransitionNetwork& net,
                                       const RecoverOptions& options) {
  check_inputs(data, options);
  const auto full = covering_network(data, net);
  std::vector<TrailRecovery> per_trail;
  per_trail.reserve(data.trails.size());
  for (std::size_t t = 0; t < data.trails.size(); ++t) per_trail.push_back(recover_one(data, t, full, options));
  return assemble(data, per_trail);
}

DatasetRecovery recover_dataset(const Dataset& data, const TransitionNetwork& net,
                                const RecoverOptions& options) {
  check_inputs(data, options);
  const auto full = covering_network(data, net);
  std::vector<TrailRecovery> per_trail(data.trails.size());
  const auto n = static_cast<std::ptrdiff_t>(data.trails.size());

  // Solver failures are caught per run inside recover_trail; anything that
  // still escapes is rethrown after the parallel region.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    try {
      per_trail[static_cast<std::size_t>(t)] = recover_one(data, static_cast<std::size_t>(t), full, options);
    } catch (...) {
#pragma omp critical(trailrec_recover_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(data, per_trail);
}

}  // namespace trailrec
