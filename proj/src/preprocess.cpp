#include "trailrec/preprocess.hpp"

#include <map>
#include <string>

#include "trailrec/error.hpp"

namespace trailrec {

GapPolicy GapPolicy::defaults_for(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::seconds: return GapPolicy{28LL * 86400};
    case TimeUnit::days:
    case TimeUnit::ticks: return GapPolicy{28};
  }
  return GapPolicy{};
}

void GapPolicy::validate() const {
  if (threshold <= 0) throw InputError("gap threshold must be positive");
}

std::vector<Trail> partition_at_gaps(const Trail& trail, const GapPolicy& policy) {
  policy.validate();
  std::vector<Trail> parts;
  if (trail.records.empty()) return parts;

  Trail current{trail.id + "#0", {trail.records.front()}};
  for (std::size_t i = 1; i < trail.records.size(); ++i) {
    const auto& prev = trail.records[i - 1];
    const auto& rec = trail.records[i];
    if (rec.time.ticks - prev.time.ticks > policy.threshold) {
      parts.push_back(std::move(current));
      current = Trail{trail.id + "#" + std::to_string(parts.size()), {}};
    }
    current.records.push_back(rec);
  }
  parts.push_back(std::move(current));
  return parts;
}

Trail add_sentinels(const Trail& trail) {
  if (trail.records.empty()) throw InputError("cannot add sentinels to empty trail '" + trail.id + "'");
  for (const auto& rec : trail.records) {
    if (is_sentinel(rec.location)) {
      throw InputError("trail '" + trail.id + "' already contains sentinel records");
    }
  }
  Trail out{trail.id, {}};
  out.records.reserve(trail.records.size() + 2);
  out.records.push_back({kBegin, trail.records.front().time});
  out.records.insert(out.records.end(), trail.records.begin(), trail.records.end());
  out.records.push_back({kEnd, trail.records.back().time});
  return out;
}

std::vector<PreparedPart> prepare_trail(const Trail& raw, const PrepareOptions& options) {
  validate(raw);
  std::vector<PreparedPart> parts;

  std::vector<Trail> pieces;
  if (options.partition) {
    pieces = partition_at_gaps(raw, options.gap);
  } else {
    pieces.push_back(Trail{raw.id + "#0", raw.records});
  }

  std::ptrdiff_t offset = 0;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    PreparedPart part;
    part.partition_index = k;
    const auto n = static_cast<std::ptrdiff_t>(pieces[k].records.size());
    if (options.sentinels) part.origin.push_back(-1);
    for (std::ptrdiff_t i = 0; i < n; ++i) part.origin.push_back(offset + i);
    if (options.sentinels) part.origin.push_back(-1);
    part.trail = options.sentinels ? add_sentinels(pieces[k]) : std::move(pieces[k]);
    offset += n;
    parts.push_back(std::move(part));
  }
  return parts;
}

Dataset prepare_dataset(const Dataset& raw, const PrepareOptions& options) {
  if (raw.prepared) return raw;
  Dataset out;
  out.locations = raw.locations;
  out.unit = raw.unit;
  out.prepared = true;
  for (const auto& trail : raw.trails) {
    for (auto& part : prepare_trail(trail, options)) {
      out.partitions.push_back(PartitionTag{trail.id, part.partition_index});
      out.trails.push_back(std::move(part.trail));
    }
  }
  return out;
}

Dataset join_partitions(const Dataset& prepared) {
  if (!prepared.prepared) return prepared;
  Dataset out;
  out.locations = prepared.locations;
  out.unit = prepared.unit;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < prepared.trails.size(); ++i) {
    const auto& id = prepared.partitions.at(i).origin_id;
    auto [it, fresh] = slot.emplace(id, out.trails.size());
    if (fresh) out.trails.push_back(Trail{id, {}});
    auto& records = out.trails[it->second].records;
    for (const auto& rec : prepared.trails[i].records) {
      if (!is_sentinel(rec.location)) records.push_back(rec);
    }
  }
  return out;
}

}  // namespace trailrec
