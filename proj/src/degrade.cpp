#include "trailrec/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "trailrec/error.hpp"
#include "trailrec/rng.hpp"

namespace trailrec {

std::string_view to_string(DegradeStrategy strategy) {
  return strategy == DegradeStrategy::mutation ? "mutation" : "resolution";
}

DegradeStrategy parse_degrade_strategy(std::string_view text) {
  if (text == "resolution") return DegradeStrategy::resolution;
  if (text == "mutation") return DegradeStrategy::mutation;
  throw InputError("unknown degrade strategy '" + std::string(text) + "' (expected resolution or mutation)");
}

void DegradeSpec::validate() const {
  if (strategy == DegradeStrategy::resolution && resolution < 2) {
    throw InputError("resolution must be at least 2 ticks");
  }
  if (strategy == DegradeStrategy::mutation) {
    if (size < 2) throw InputError("mutation window size must be at least 2");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InputError("mutation fraction must lie in (0, 1]");
  }
}

Trail collapse_resolution(const Trail& trail, std::int64_t resolution) {
  if (resolution < 1) throw InputError("resolution must be positive");
  Trail out = trail;
  for (auto& rec : out.records) rec.time.ticks = (rec.time.ticks / resolution) * resolution;
  return out;
}

std::vector<RunOrdering> answer_key(const Trail& degraded, std::span<const std::size_t> origin) {
  if (origin.size() != degraded.records.size()) throw InputError("origin map does not match trail length");
  std::vector<RunOrdering> answers;
  const auto runs = detect_broken_points(degraded);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    RunOrdering answer{degraded.id, r, {}};
    for (const auto& layer : runs[r].layers) {
      std::vector<std::size_t> members = layer.members;
      std::sort(members.begin(), members.end(),
                [&](std::size_t a, std::size_t b) { return origin[a] < origin[b]; });
      SlotOrdering slot{layer.slot_time, {}};
      for (auto idx : members) slot.ordering.push_back(degraded.records[idx].location);
      answer.slots.push_back(std::move(slot));
    }
    answers.push_back(std::move(answer));
  }
  return answers;
}

namespace {

/// Window starts per trail, placed by rejection sampling over a global
/// record index so that the requested fraction holds over the whole input.
std::vector<std::vector<std::size_t>> plan_windows(std::span<const Trail> trails, std::size_t size,
                                                   double fraction, Rng& rng) {
  std::vector<std::vector<std::size_t>> starts(trails.size());
  std::vector<std::size_t> offsets(trails.size() + 1, 0);
  for (std::size_t t = 0; t < trails.size(); ++t) offsets[t + 1] = offsets[t] + trails[t].records.size();
  const std::size_t total = offsets.back();
  if (total == 0) return starts;

  const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total) /
                                                            static_cast<double>(size)));
  std::vector<std::vector<char>> used(trails.size());
  for (std::size_t t = 0; t < trails.size(); ++t) used[t].assign(trails[t].records.size(), 0);

  const std::size_t max_attempts = 100 * target + 1000;
  std::size_t placed = 0;
  for (std::size_t attempt = 0; placed < target && attempt < max_attempts; ++attempt) {
    const std::size_t g = static_cast<std::size_t>(rng.index(total));
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), g);
    const auto t = static_cast<std::size_t>(it - offsets.begin()) - 1;
    const std::size_t p = g - offsets[t];
    const auto& recs = trails[t].records;
    if (p + size > recs.size()) continue;

    bool ok = true;
    for (std::size_t i = p; i < p + size && ok; ++i) ok = !used[t][i] && !is_sentinel(recs[i].location);
    // Keep at least one untouched record between windows.
    if (ok && p > 0 && used[t][p - 1]) ok = false;
    if (ok && p + size < recs.size() && used[t][p + size]) ok = false;
    if (!ok) continue;

    for (std::size_t i = p; i < p + size; ++i) used[t][i] = 1;
    starts[t].push_back(p);
    ++placed;
  }
  for (auto& s : starts) std::sort(s.begin(), s.end());
  return starts;
}

MutationOutcome apply_windows(const Trail& trail, std::span<const std::size_t> starts, std::size_t size,
                              std::uint64_t seed) {
  MutationOutcome out{trail, {}, starts.size()};
  std::vector<std::size_t> origin(trail.records.size());
  std::iota(origin.begin(), origin.end(), std::size_t{0});
  Rng rng(seed);

  std::vector<std::size_t> perm(size);
  for (auto p : starts) {
    const Timestamp slot = trail.records[p].time;
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    for (std::size_t k = 0; k < size; ++k) {
      out.degraded.records[p + k] = TrailRecord{trail.records[p + perm[k]].location, slot};
      origin[p + k] = p + perm[k];
    }
  }
  out.answers = answer_key(out.degraded, origin);
  return out;
}

}  // namespace

MutationOutcome mutate_order(const Trail& trail, std::size_t size, double fraction, std::uint64_t seed) {
  DegradeSpec{DegradeStrategy::mutation, 2, size, fraction, seed}.validate();
  std::size_t real = 0;
  for (const auto& rec : trail.records) real += is_sentinel(rec.location) ? 0 : 1;
  if (real < size) {
    throw InputError("trail '" + trail.id + "' is too short for a mutation window of size " + std::to_string(size));
  }
  Rng rng(seed);
  const auto starts = plan_windows(std::span<const Trail>(&trail, 1), size, fraction, rng);
  return apply_windows(trail, starts[0], size, derive_seed(seed, 0));
}

DegradedDataset degrade(const Dataset& data, const DegradeSpec& spec) {
  spec.validate();
  if (data.prepared) throw InputError("degrade expects unbroken raw trails, not preprocessed ones");
  DegradedDataset out;
  out.data.locations = data.locations;
  out.data.unit = data.unit;

  if (spec.strategy == DegradeStrategy::resolution) {
    for (const auto& trail : data.trails) {
      Trail collapsed = collapse_resolution(trail, spec.resolution);
      std::vector<std::size_t> origin(collapsed.records.size());
      std::iota(origin.begin(), origin.end(), std::size_t{0});
      auto answers = answer_key(collapsed, origin);
      out.answers.insert(out.answers.end(), answers.begin(), answers.end());
      out.data.trails.push_back(std::move(collapsed));
    }
    return out;
  }

  Rng rng(spec.seed);
  const auto starts = plan_windows(data.trails, spec.size, spec.fraction, rng);
  for (std::size_t t = 0; t < data.trails.size(); ++t) {
    if (data.trails[t].records.size() < spec.size) ++out.short_trails;
    auto mutated = apply_windows(data.trails[t], starts[t], spec.size, derive_seed(spec.seed, t));
    out.windows += mutated.windows;
    out.answers.insert(out.answers.end(), mutated.answers.begin(), mutated.answers.end());
    out.data.trails.push_back(std::move(mutated.degraded));
  }
  return out;
}

}  // namespace trailrec
