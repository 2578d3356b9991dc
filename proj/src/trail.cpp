#include "trailrec/trail.hpp"

#include <algorithm>

#include "trailrec/error.hpp"

namespace trailrec {

std::string_view to_string(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::ticks: return "ticks";
    case TimeUnit::days: return "days";
    case TimeUnit::seconds: return "seconds";
  }
  return "ticks";
}

TimeUnit parse_time_unit(std::string_view text) {
  if (text == "ticks") return TimeUnit::ticks;
  if (text == "days") return TimeUnit::days;
  if (text == "seconds") return TimeUnit::seconds;
  throw InputError("unknown time unit '" + std::string(text) + "' (expected ticks, days or seconds)");
}

LocationTable::LocationTable() {
  tokens_ = {std::string(kBeginToken), std::string(kEndToken)};
  index_.emplace(tokens_[0], kBegin.value);
  index_.emplace(tokens_[1], kEnd.value);
}

LocationId LocationTable::intern(std::string_view token) {
  if (token.empty()) throw InputError("empty location token");
  if (token == kBeginToken || token == kEndToken) {
    throw InputError("location token '" + std::string(token) + "' is reserved for sentinels");
  }
  std::string key(token);
  if (auto it = index_.find(key); it != index_.end()) return LocationId{it->second};
  const auto id = static_cast<std::uint32_t>(tokens_.size());
  index_.emplace(key, id);
  tokens_.push_back(std::move(key));
  return LocationId{id};
}

std::optional<LocationId> LocationTable::find(std::string_view token) const {
  if (auto it = index_.find(std::string(token)); it != index_.end()) return LocationId{it->second};
  return std::nullopt;
}

LocationId LocationTable::at(std::string_view token) const {
  if (auto id = find(token)) return *id;
  throw InputError("unknown location '" + std::string(token) + "'");
}

const std::string& LocationTable::token(LocationId id) const {
  if (id.value >= tokens_.size()) {
    throw InputError("location index " + std::to_string(id.value) + " out of range");
  }
  return tokens_[id.value];
}

bool LocationTable::is_prefix_of(const LocationTable& other) const {
  if (other.size() < size()) return false;
  return std::equal(tokens_.begin(), tokens_.end(), other.tokens_.begin());
}

void validate(const Trail& trail) {
  if (trail.records.empty()) throw InputError("trail '" + trail.id + "' has no records");
  for (std::size_t i = 0; i < trail.records.size(); ++i) {
    if (trail.records[i].time.ticks < 0) {
      throw InputError("trail '" + trail.id + "' has a negative timestamp");
    }
    if (i > 0 && trail.records[i].time < trail.records[i - 1].time) {
      throw InputError("trail '" + trail.id + "' has decreasing timestamps at record " +
                       std::to_string(i));
    }
  }
}

std::size_t BrokenRun::token_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.members.size();
  return n;
}

std::vector<LocationId> RunOrdering::sequence() const {
  std::vector<LocationId> seq;
  for (const auto& slot : slots) seq.insert(seq.end(), slot.ordering.begin(), slot.ordering.end());
  return seq;
}

namespace {

struct Slot {
  std::size_t begin;
  std::size_t end;
  std::vector<std::size_t> members;
  bool broken;
};

std::vector<Slot> slots_of(const Trail& trail) {
  std::vector<Slot> slots;
  const auto& recs = trail.records;
  std::size_t i = 0;
  while (i < recs.size()) {
    std::size_t j = i;
    Slot slot{i, i, {}, false};
    std::optional<LocationId> first;
    while (j < recs.size() && recs[j].time == recs[i].time) {
      if (!is_sentinel(recs[j].location)) {
        slot.members.push_back(j);
        if (!first) {
          first = recs[j].location;
        } else if (*first != recs[j].location) {
          slot.broken = true;
        }
      }
      ++j;
    }
    slot.end = j;
    slots.push_back(std::move(slot));
    i = j;
  }
  return slots;
}

}  // namespace

std::vector<BrokenRun> detect_broken_points(const Trail& trail) {
  std::vector<BrokenRun> runs;
  const auto slots = slots_of(trail);
  const auto& recs = trail.records;

  std::size_t s = 0;
  while (s < slots.size()) {
    if (!slots[s].broken) {
      ++s;
      continue;
    }
    BrokenRun run;
    std::size_t e = s;
    while (e < slots.size() && slots[e].broken) {
      run.layers.push_back(BrokenPoint{recs[slots[e].begin].time, slots[e].members});
      ++e;
    }
    const std::size_t first_member = run.layers.front().members.front();
    const std::size_t last_member = run.layers.back().members.back();
    run.source = first_member > 0 ? recs[first_member - 1].location : kBegin;
    run.target = last_member + 1 < recs.size() ? recs[last_member + 1].location : kEnd;
    runs.push_back(std::move(run));
    s = e;
  }
  return runs;
}

}  // namespace trailrec
