#include "trailrec/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <omp.h>

#include "trailrec/error.hpp"

namespace trailrec {

std::string_view to_string(SmoothingMode mode) {
  return mode == SmoothingMode::floor ? "floor" : "none";
}

SmoothingMode parse_smoothing_mode(std::string_view text) {
  if (text == "none") return SmoothingMode::none;
  if (text == "floor") return SmoothingMode::floor;
  throw InputError("unknown smoothing mode '" + std::string(text) + "' (expected none or floor)");
}

TransitionCounts::TransitionCounts(std::size_t n_locations)
    : n_(n_locations), counts_(n_locations * n_locations, 0) {}

void TransitionCounts::add(LocationId from, LocationId to, std::uint64_t n) {
  if (from.value >= n_ || to.value >= n_) throw InputError("transition endpoint outside location table");
  counts_[static_cast<std::size_t>(from.value) * n_ + to.value] += n;
}

void TransitionCounts::add_trail(const Trail& trail) {
  const auto& recs = trail.records;
  std::vector<char> broken(recs.size(), 0);
  for (const auto& run : detect_broken_points(trail)) {
    for (const auto& layer : run.layers) {
      for (auto idx : layer.members) broken[idx] = 1;
    }
  }
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    if (broken[i] || broken[i + 1]) continue;
    add(recs[i].location, recs[i + 1].location);
  }
}

void TransitionCounts::merge(const TransitionCounts& other) {
  if (other.n_ != n_) throw InputError("cannot merge transition tallies of different sizes");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

TransitionNetwork::TransitionNetwork(LocationTable locations, TransitionCounts counts,
                                     SmoothingPolicy smoothing)
    : locations_(std::move(locations)), counts_(std::move(counts)), smoothing_(smoothing) {
  const std::size_t n = locations_.size();
  if (counts_.size() != n) throw InputError("transition tally does not match location table");

  out_totals_.assign(n, 0);
  in_totals_.assign(n, 0);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      const auto c = counts_(LocationId{a}, LocationId{b});
      out_totals_[a] += c;
      in_totals_[b] += c;
    }
  }

  probs_.assign(n * n, 0.0);
  for (std::uint32_t a = 0; a < n; ++a) {
    if (out_totals_[a] == 0) continue;
    const auto total = static_cast<double>(out_totals_[a]);
    for (std::uint32_t b = 0; b < n; ++b) {
      probs_[a * n + b] = static_cast<double>(counts_(LocationId{a}, LocationId{b})) / total;
    }
  }

  if (smoothing_.mode == SmoothingMode::floor) {
    if (!(smoothing_.floor_prob > 0.0 && smoothing_.floor_prob < 1.0)) {
      throw InputError("smoothing floor probability must lie in (0, 1)");
    }
    if (smoothing_.floor_prob >= min_observed_prob()) {
      throw InputError("smoothing floor probability must be below the smallest observed probability");
    }
  }

  const double unseen = smoothing_.mode == SmoothingMode::floor
                            ? -std::log(smoothing_.floor_prob)
                            : std::numeric_limits<double>::infinity();
  distances_.resize(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    distances_[i] = probs_[i] > 0.0 ? -std::log(probs_[i]) : unseen;
  }
}

void TransitionNetwork::check(LocationId id) const {
  if (id.value >= locations_.size()) {
    throw InputError("location index " + std::to_string(id.value) + " is not in the network");
  }
}

std::uint64_t TransitionNetwork::count(LocationId from, LocationId to) const {
  check(from);
  check(to);
  return counts_(from, to);
}

std::uint64_t TransitionNetwork::out_total(LocationId from) const {
  check(from);
  return out_totals_[from.value];
}

std::uint64_t TransitionNetwork::in_total(LocationId to) const {
  check(to);
  return in_totals_[to.value];
}

double TransitionNetwork::prob(LocationId from, LocationId to) const {
  check(from);
  check(to);
  return probs_[static_cast<std::size_t>(from.value) * size() + to.value];
}

double TransitionNetwork::neg_log_distance(LocationId from, LocationId to) const {
  check(from);
  check(to);
  return distances_[static_cast<std::size_t>(from.value) * size() + to.value];
}

double TransitionNetwork::min_observed_prob() const {
  double best = 1.0;
  for (double p : probs_) {
    if (p > 0.0) best = std::min(best, p);
  }
  return best;
}

TransitionNetwork TransitionNetwork::with_smoothing(SmoothingPolicy smoothing) const {
  return TransitionNetwork(locations_, counts_, smoothing);
}

TransitionNetwork TransitionNetwork::extended_to(const LocationTable& table) const {
  if (!locations_.is_prefix_of(table)) {
    throw InputError("location table does not extend the network's table");
  }
  TransitionCounts grown(table.size());
  const auto n = static_cast<std::uint32_t>(size());
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      if (auto c = counts_(LocationId{a}, LocationId{b})) grown.add(LocationId{a}, LocationId{b}, c);
    }
  }
  return TransitionNetwork(table, std::move(grown), smoothing_);
}

namespace {

// Runs before any tallying so that nothing can throw inside a parallel region.
void check_extract_inputs(const LocationTable& locations, std::span<const Trail> trails) {
  if (trails.empty()) throw InputError("cannot extract a transition network from zero trails");
  for (const auto& trail : trails) {
    for (const auto& rec : trail.records) {
      if (rec.location.value >= locations.size()) {
        throw InputError("trail '" + trail.id + "' refers to a location outside the table");
      }
    }
  }
}

}  // namespace

TransitionNetwork extract_serial(const LocationTable& locations, std::span<const Trail> trails,
                                 SmoothingPolicy smoothing) {
  check_extract_inputs(locations, trails);
  TransitionCounts counts(locations.size());
  for (const auto& trail : trails) counts.add_trail(trail);
  return TransitionNetwork(locations, std::move(counts), smoothing);
}

TransitionNetwork extract(const LocationTable& locations, std::span<const Trail> trails,
                          SmoothingPolicy smoothing) {
  check_extract_inputs(locations, trails);
  TransitionCounts total(locations.size());
  const auto n = static_cast<std::ptrdiff_t>(trails.size());

#pragma omp parallel
  {
    TransitionCounts local(locations.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) local.add_trail(trails[static_cast<std::size_t>(i)]);
    // Integer sums commute, so the merge order does not matter.
#pragma omp critical(trailrec_extract_merge)
    total.merge(local);
  }
  return TransitionNetwork(locations, std::move(total), smoothing);
}

double score_sequence(const TransitionNetwork& net, std::span<const LocationId> seq) {
  if (seq.size() < 2) throw InputError("cannot score a sequence shorter than 2");
  double distance = 0.0;
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) distance += net.neg_log_distance(seq[k], seq[k + 1]);
  return -distance;
}

}  // namespace trailrec
