#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "trailrec/trail.hpp"

namespace trailrec {

enum class SmoothingMode { none, floor };

std::string_view to_string(SmoothingMode mode);
SmoothingMode parse_smoothing_mode(std::string_view text);

/// How unobserved transitions are priced when a solver queries them.
/// Under `floor`, P(b|a) = 0 is replaced by `floor_prob` at query time only;
/// the stored probabilities stay unsmoothed.
struct SmoothingPolicy {
  SmoothingMode mode = SmoothingMode::none;
  double floor_prob = 1e-9;
  bool operator==(const SmoothingPolicy&) const = default;
};

/// Dense N(A->B) tally. Merging two tallies is a matrix sum.
class TransitionCounts {
 public:
  explicit TransitionCounts(std::size_t n_locations = 0);

  /// Adds every consecutive pair in which neither record belongs to a
  /// broken point.
  void add_trail(const Trail& trail);
  void add(LocationId from, LocationId to, std::uint64_t n = 1);
  void merge(const TransitionCounts& other);

  std::uint64_t operator()(LocationId from, LocationId to) const {
    return counts_[static_cast<std::size_t>(from.value) * n_ + to.value];
  }
  std::size_t size() const { return n_; }
  bool operator==(const TransitionCounts&) const = default;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
};

/// First-order Markov transition network over a dataset's locations,
/// sentinels included.
class TransitionNetwork {
 public:
  TransitionNetwork(LocationTable locations, TransitionCounts counts, SmoothingPolicy smoothing = {});

  const LocationTable& locations() const { return locations_; }
  const TransitionCounts& counts() const { return counts_; }
  const SmoothingPolicy& smoothing() const { return smoothing_; }
  std::size_t size() const { return locations_.size(); }

  std::uint64_t count(LocationId from, LocationId to) const;
  std::uint64_t out_total(LocationId from) const;
  std::uint64_t in_total(LocationId to) const;

  /// Unsmoothed P(to | from) = N(from->to) / N(from); 0 when N(from) = 0.
  double prob(LocationId from, LocationId to) const;

  /// -log P(to | from), with +inf or -log(floor_prob) for unobserved pairs.
  double neg_log_distance(LocationId from, LocationId to) const;

  /// Smallest non-zero probability, or 1 when nothing was observed.
  double min_observed_prob() const;

  /// Whether entry / exit behaviour was observed at all. Networks built
  /// without sentinels report false and solvers leave run endpoints open.
  bool has_begin_statistics() const { return out_total(kBegin) > 0; }
  bool has_end_statistics() const { return in_total(kEnd) > 0; }

  TransitionNetwork with_smoothing(SmoothingPolicy smoothing) const;

  /// Same counts re-indexed over a table that extends this network's table
  /// (new locations get zero rows and columns).
  TransitionNetwork extended_to(const LocationTable& table) const;

 private:
  void check(LocationId id) const;

  LocationTable locations_;
  TransitionCounts counts_;
  SmoothingPolicy smoothing_;
  std::vector<std::uint64_t> out_totals_;
  std::vector<std::uint64_t> in_totals_;
  std::vector<double> probs_;
  std::vector<double> distances_;
};

/// Builds the network from prepared trails, tallying trails in parallel.
TransitionNetwork extract(const LocationTable& locations, std::span<const Trail> trails,
                          SmoothingPolicy smoothing = {});

/// Single-threaded reference for extract().
TransitionNetwork extract_serial(const LocationTable& locations, std::span<const Trail> trails,
                                 SmoothingPolicy smoothing = {});

/// Sum of log P(seq[k+1] | seq[k]); -inf when any step is forbidden.
double score_sequence(const TransitionNetwork& net, std::span<const LocationId> seq);

}  // namespace trailrec
