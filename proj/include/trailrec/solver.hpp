#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "trailrec/trail.hpp"
#include "trailrec/transition.hpp"

namespace trailrec {

enum class Strategy { exact, acs, greedy, random };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view text);

inline constexpr std::uint64_t kDefaultExactBudget = 10'000'000;

/// Scores within this relative distance of each other are treated as tied;
/// ties resolve to the lexicographically smallest location sequence.
inline constexpr double kScoreTieTolerance = 1e-12;

/// Ant colony system settings.
struct AcsParams {
  double tau0 = 0.5;   ///< initial pheromone
  double beta = 2.0;   ///< heuristic exponent
  double q0 = 0.9;     ///< probability of the greedy (exploitation) move
  double alpha = 0.1;  ///< global evaporation
  double rho = 0.1;    ///< local evaporation
  std::size_t ants = 10;
  std::size_t iterations = 300;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const AcsParams&) const = default;
};

/// One broken run posed as a layered open-path ATSP.
///
/// A feasible ordering is `source, perm(layer 0), ..., perm(layer T-1), target`.
/// An absent endpoint is "open": it contributes no transition, which is how
/// networks extracted without sentinels treat trail boundaries.
class SolverInstance {
 public:
  SolverInstance(const TransitionNetwork& net, std::optional<LocationId> source,
                 std::optional<LocationId> target, std::vector<std::vector<LocationId>> layers);

  /// Builds the instance for `run` of `trail`. Sentinel endpoints are left
  /// open when the network carries no entry/exit statistics.
  static SolverInstance from_run(const TransitionNetwork& net, const Trail& trail, const BrokenRun& run);

  const TransitionNetwork& net() const { return *net_; }
  const std::optional<LocationId>& source() const { return source_; }
  const std::optional<LocationId>& target() const { return target_; }
  const std::vector<std::vector<LocationId>>& layers() const { return layers_; }

  std::size_t token_count() const;
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t max_layer_size() const;

  /// Product of |layer_k|!, saturating at UINT64_MAX.
  std::uint64_t ordering_bound() const;

  /// Whether `ordering` (endpoints included when present) is a within-layer
  /// permutation that respects layer order.
  bool is_feasible(std::span<const LocationId> ordering) const;

 private:
  const TransitionNetwork* net_;
  std::optional<LocationId> source_;
  std::optional<LocationId> target_;
  std::vector<std::vector<LocationId>> layers_;
};

struct RecoveryResult {
  /// Feasible ordering including the endpoints that are present.
  std::vector<LocationId> ordering;
  /// score_sequence(net, ordering); -inf when infeasible.
  double log_prob = 0.0;
  Strategy solver = Strategy::exact;
  std::chrono::nanoseconds elapsed{0};
  /// Complete orderings scored (exact, after pruning) or ant tours built
  /// (ACS); 1 otherwise.
  std::uint64_t evaluated = 0;
  bool infeasible = false;
};

/// Token graph shared by the tour-building solvers. Nodes 0..M-1 are the
/// tokens in layer order, node M is the source and node M+1 the target.
/// Edges that break layer precedence have infinite distance.
class LayeredGraph {
 public:
  explicit LayeredGraph(const SolverInstance& instance);

  std::size_t token_count() const { return locations_.size(); }
  std::size_t source_node() const { return locations_.size(); }
  std::size_t target_node() const { return locations_.size() + 1; }
  std::size_t node_count() const { return locations_.size() + 2; }

  double distance(std::size_t from, std::size_t to) const { return distances_[from * node_count() + to]; }
  LocationId location(std::size_t token) const { return locations_[token]; }
  std::size_t layer_of(std::size_t token) const { return layer_of_[token]; }
  const std::vector<std::vector<std::size_t>>& layer_nodes() const { return layer_nodes_; }

  /// Sum of distances along a node path.
  double path_length(std::span<const std::size_t> nodes) const;

 private:
  std::vector<LocationId> locations_;
  std::vector<std::size_t> layer_of_;
  std::vector<std::vector<std::size_t>> layer_nodes_;
  std::vector<double> distances_;
};

/// Depth-first search over every distinct feasible ordering, pruning
/// prefixes that cannot win. Throws BudgetExceeded when
/// ordering_bound() > budget.
RecoveryResult solve_exact(const SolverInstance& instance, std::uint64_t budget = kDefaultExactBudget);

/// Ant colony system on the layered graph; deterministic given params.seed.
RecoveryResult solve_acs(const SolverInstance& instance, const AcsParams& params);

/// Repeatedly moves to the most probable eligible token.
RecoveryResult solve_greedy(const SolverInstance& instance);

/// Uniformly random permutation within each layer.
RecoveryResult solve_random(const SolverInstance& instance, std::uint64_t seed);

}  // namespace trailrec
