#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trailrec {

/// Dense index of an interned location token.
struct LocationId {
  std::uint32_t value = 0;
  auto operator<=>(const LocationId&) const = default;
};

inline constexpr LocationId kBegin{0};
inline constexpr LocationId kEnd{1};
inline constexpr std::string_view kBeginToken = "_BEGIN_";
inline constexpr std::string_view kEndToken = "_END_";

constexpr bool is_sentinel(LocationId id) { return id == kBegin || id == kEnd; }

/// Integer tick count; the tick unit is dataset metadata.
struct Timestamp {
  std::int64_t ticks = 0;
  auto operator<=>(const Timestamp&) const = default;
};

enum class TimeUnit { ticks, days, seconds };

std::string_view to_string(TimeUnit unit);
TimeUnit parse_time_unit(std::string_view text);

/// Bijective token <-> index map for one dataset.
///
/// The sentinels always occupy indices 0 and 1; every other token gets the
/// next free index in first-seen order.
class LocationTable {
 public:
  LocationTable();

  /// Interns a data token. Empty and reserved tokens are rejected.
  LocationId intern(std::string_view token);
  std::optional<LocationId> find(std::string_view token) const;
  /// Like find() but throws InputError for unknown tokens.
  LocationId at(std::string_view token) const;
  const std::string& token(LocationId id) const;

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// True when `other` starts with exactly this table's tokens.
  bool is_prefix_of(const LocationTable& other) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct TrailRecord {
  LocationId location;
  Timestamp time;
  bool operator==(const TrailRecord&) const = default;
};

struct Trail {
  std::string id;
  std::vector<TrailRecord> records;
  bool operator==(const Trail&) const = default;
};

/// Throws InputError when the trail is empty or its timestamps decrease.
void validate(const Trail& trail);

/// One time slot whose records span at least two distinct real locations.
/// `members` index into the owning trail; sentinel records are never members.
struct BrokenPoint {
  Timestamp slot_time;
  std::vector<std::size_t> members;
  bool operator==(const BrokenPoint&) const = default;
};

/// Maximal group of consecutive broken slots, solved as one instance.
struct BrokenRun {
  std::vector<BrokenPoint> layers;
  LocationId source = kBegin;
  LocationId target = kEnd;

  std::size_t token_count() const;
  bool operator==(const BrokenRun&) const = default;
};

/// Finds every maximal run of broken slots in time order.
std::vector<BrokenRun> detect_broken_points(const Trail& trail);

/// Visiting order of the tokens of one broken slot.
struct SlotOrdering {
  Timestamp time;
  std::vector<LocationId> ordering;
  bool operator==(const SlotOrdering&) const = default;
};

/// Per-slot orderings of one broken run, keyed by (trail_id, run_index).
/// Used both for answer keys and for recovered results.
struct RunOrdering {
  std::string trail_id;
  std::size_t run_index = 0;
  std::vector<SlotOrdering> slots;

  /// Concatenation of the slot orderings.
  std::vector<LocationId> sequence() const;
  bool operator==(const RunOrdering&) const = default;
};

/// Partition metadata for trails that came out of the preprocess stage.
struct PartitionTag {
  std::string origin_id;
  std::size_t index = 0;
  bool operator==(const PartitionTag&) const = default;
};

struct Dataset {
  LocationTable locations;
  std::vector<Trail> trails;
  TimeUnit unit = TimeUnit::ticks;
  /// Set when the trails are already partitioned and sentinel-augmented;
  /// `partitions` is then parallel to `trails`.
  bool prepared = false;
  std::vector<PartitionTag> partitions;
};

}  // namespace trailrec
