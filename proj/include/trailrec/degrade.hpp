#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "trailrec/trail.hpp"

namespace trailrec {

enum class DegradeStrategy { resolution, mutation };

std::string_view to_string(DegradeStrategy strategy);
DegradeStrategy parse_degrade_strategy(std::string_view text);

struct DegradeSpec {
  DegradeStrategy strategy = DegradeStrategy::resolution;
  std::int64_t resolution = 2;  ///< ticks per collapsed slot (resolution strategy)
  std::size_t size = 2;         ///< records per mutated window (mutation strategy)
  double fraction = 0.2;        ///< share of records placed inside windows
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const DegradeSpec&) const = default;
};

/// Maps every timestamp t to floor(t / resolution) * resolution.
Trail collapse_resolution(const Trail& trail, std::int64_t resolution);

/// True per-slot orderings of every broken run in `degraded`, where record i
/// of `degraded` was record `origin[i]` of the unbroken trail.
std::vector<RunOrdering> answer_key(const Trail& degraded, std::span<const std::size_t> origin);

struct MutationOutcome {
  Trail degraded;
  std::vector<RunOrdering> answers;
  std::size_t windows = 0;
};

/// Order mutation on a single trail: picks non-overlapping, non-touching
/// windows of `size` records until round(fraction * n / size) windows are
/// placed, gives each window its first timestamp and shuffles it.
/// Throws InputError when the trail cannot host even one window.
MutationOutcome mutate_order(const Trail& trail, std::size_t size, double fraction, std::uint64_t seed);

struct DegradedDataset {
  Dataset data;
  std::vector<RunOrdering> answers;
  std::size_t windows = 0;
  /// Trails too short to host a mutation window (left unchanged).
  std::size_t short_trails = 0;
};

/// Applies the spec to every trail. Mutation windows are placed across the
/// whole dataset so that the fraction holds globally.
DegradedDataset degrade(const Dataset& data, const DegradeSpec& spec);

}  // namespace trailrec
