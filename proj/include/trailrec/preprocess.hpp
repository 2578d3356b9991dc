#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trailrec/trail.hpp"

namespace trailrec {

/// Consecutive records further apart than `threshold` ticks are a gap point.
struct GapPolicy {
  std::int64_t threshold = 28;

  /// 28 days expressed in the given unit (ticks are treated like days).
  static GapPolicy defaults_for(TimeUnit unit);
  void validate() const;
  bool operator==(const GapPolicy&) const = default;
};

/// Cuts the trail between records i and i+1 whenever t[i+1] - t[i] > threshold.
/// Part k is named "<id>#k".
std::vector<Trail> partition_at_gaps(const Trail& trail, const GapPolicy& policy);

/// Prepends a _BEGIN_ record and appends an _END_ record carrying the
/// timestamps of the first and last real records.
Trail add_sentinels(const Trail& trail);

struct PrepareOptions {
  bool partition = true;
  bool sentinels = true;
  GapPolicy gap;
  bool operator==(const PrepareOptions&) const = default;
};

/// One phase-1 partition of a raw trail. `origin[i]` is the raw record index
/// of partition record i, or -1 for a sentinel.
struct PreparedPart {
  Trail trail;
  std::size_t partition_index = 0;
  std::vector<std::ptrdiff_t> origin;
};

/// Partition then sentinel-augment, in that order.
std::vector<PreparedPart> prepare_trail(const Trail& raw, const PrepareOptions& options);

/// Applies prepare_trail to every trail. Already-prepared datasets are
/// returned unchanged.
Dataset prepare_dataset(const Dataset& raw, const PrepareOptions& options);

/// Inverse of prepare_dataset: drops sentinel records and joins partitions
/// back into their original trails. Raw datasets are returned unchanged.
Dataset join_partitions(const Dataset& prepared);

}  // namespace trailrec
