#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "trailrec/analysis.hpp"
#include "trailrec/metrics.hpp"
#include "trailrec/recover.hpp"
#include "trailrec/synth.hpp"
#include "trailrec/trail.hpp"
#include "trailrec/transition.hpp"

namespace trailrec {

using Json = nlohmann::json;

/// Parses a timestamp cell: an integer tick count, or for days / seconds an
/// ISO-8601 date (YYYY-MM-DD) or date-time (YYYY-MM-DDTHH:MM:SS[Z]).
std::int64_t parse_timestamp(std::string_view text, TimeUnit unit);

/// Reads `trail_id,timestamp,location` rows, optionally followed by
/// `partition_idx,is_sentinel` for preprocessed files. Rows must be grouped
/// by trail and time-sorted. Tokens are interned on top of `base`.
Dataset read_trails_csv(std::istream& in, TimeUnit unit, LocationTable base = {},
                        std::string_view source = "<input>");
Dataset read_trails_csv(const std::filesystem::path& path, TimeUnit unit, LocationTable base = {});

/// Timestamps are written as integer ticks. Prepared datasets get the
/// partition columns.
void write_trails_csv(std::ostream& out, const Dataset& data);
void write_trails_csv(const std::filesystem::path& path, const Dataset& data);

Json network_to_json(const TransitionNetwork& net, TimeUnit unit);
TransitionNetwork network_from_json(const Json& j);

Json hidden_to_json(const HiddenModel& model);

Json orderings_to_json(std::span<const RunOrdering> runs, const LocationTable& locations);
/// Unknown tokens are interned into `locations`.
std::vector<RunOrdering> orderings_from_json(const Json& j, LocationTable& locations);

/// Per-run recovery results. Elapsed times are only written on request so
/// that seeded runs produce identical files.
Json results_to_json(std::span<const RunRecovery> runs, const LocationTable& locations, bool with_timings);

Json report_to_json(const EvalReport& report);
EvalReport report_from_json(const Json& j);
/// Fixed-width two-column table for terminals.
std::string format_report(const EvalReport& report);

Json rank_to_json(const RankReport& report);
RankReport rank_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace trailrec
