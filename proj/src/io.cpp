#include "trailrec/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "trailrec/error.hpp"

namespace trailrec {

namespace {

bool parse_int(std::string_view text, std::int64_t& value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int digits(std::string_view s, std::size_t pos, std::size_t len) {
  if (pos + len > s.size()) return -1;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return -1;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

/// Splits one CSV line; quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv(std::string_view line, bool& ok) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  ok = true;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && trim(cur).empty()) {
      cur.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) ok = false;
  fields.push_back(was_quoted ? cur : std::string(trim(cur)));
  return fields;
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text, TimeUnit unit) {
  text = trim(text);
  std::int64_t ticks = 0;
  if (parse_int(text, ticks)) return ticks;
  if (unit == TimeUnit::ticks) {
    throw InputError("timestamp '" + std::string(text) + "' is not an integer tick count");
  }

  const int y = digits(text, 0, 4);
  const int mo = digits(text, 5, 2);
  const int d = digits(text, 8, 2);
  if (y < 0 || mo < 0 || d < 0 || text[4] != '-' || text[7] != '-') {
    throw InputError("timestamp '" + std::string(text) + "' is neither an integer nor an ISO-8601 date");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw InputError("timestamp '" + std::string(text) + "' is not a valid date");
  const std::int64_t days = std::chrono::sys_days{ymd}.time_since_epoch().count();

  std::int64_t seconds = 0;
  if (text.size() > 10) {
    std::string_view rest = text.substr(10);
    if (rest.back() == 'Z') rest.remove_suffix(1);
    const int h = digits(rest, 1, 2);
    const int mi = digits(rest, 4, 2);
    const int s = rest.size() > 6 ? digits(rest, 7, 2) : 0;
    const bool shape = (rest[0] == 'T' || rest[0] == ' ') && rest.size() >= 6 && rest[3] == ':' &&
                       (rest.size() == 6 || (rest.size() == 9 && rest[6] == ':'));
    if (!shape || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) {
      throw InputError("timestamp '" + std::string(text) + "' has a malformed time of day");
    }
    seconds = h * 3600 + mi * 60 + s;
  }
  return unit == TimeUnit::days ? days : days * 86400 + seconds;
}

Dataset read_trails_csv(std::istream& in, TimeUnit unit, LocationTable base, std::string_view source) {
  const std::string where(source);
  auto fail = [&](std::size_t line, const std::string& msg) -> InputError {
    return InputError(where + ":" + std::to_string(line) + ": " + msg);
  };

  Dataset data;
  data.locations = std::move(base);
  data.unit = unit;

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      bool ok = true;
      header = split_csv(line, ok);
      break;
    }
  }
  if (header.empty()) throw InputError(where + ": missing CSV header");
  const std::vector<std::string> raw_cols = {"trail_id", "timestamp", "location"};
  const std::vector<std::string> prepared_cols = {"trail_id", "timestamp", "location", "partition_idx",
                                                  "is_sentinel"};
  if (header == prepared_cols) {
    data.prepared = true;
  } else if (header != raw_cols) {
    throw fail(line_no, "header must be 'trail_id,timestamp,location' (optionally followed by "
                        "'partition_idx,is_sentinel')");
  }
  const std::size_t width = header.size();

  std::set<std::pair<std::string, std::int64_t>> finished;
  std::pair<std::string, std::int64_t> current;
  bool have_current = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    bool ok = true;
    const auto cells = split_csv(line, ok);
    if (!ok) throw fail(line_no, "unterminated quoted field");
    if (cells.size() != width) {
      throw fail(line_no, "expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()));
    }
    if (cells[0].empty()) throw fail(line_no, "empty trail_id");

    std::int64_t part = 0;
    bool sentinel = false;
    if (data.prepared) {
      if (!parse_int(cells[3], part) || part < 0) throw fail(line_no, "bad partition_idx '" + cells[3] + "'");
      if (cells[4] != "0" && cells[4] != "1") throw fail(line_no, "is_sentinel must be 0 or 1");
      sentinel = cells[4] == "1";
    }

    std::int64_t ticks = 0;
    try {
      ticks = parse_timestamp(cells[1], unit);
    } catch (const InputError& e) {
      throw fail(line_no, e.what());
    }
    if (ticks < 0) throw fail(line_no, "negative timestamp");

    LocationId loc;
    if (sentinel) {
      if (cells[2] == kBeginToken) {
        loc = kBegin;
      } else if (cells[2] == kEndToken) {
        loc = kEnd;
      } else {
        throw fail(line_no, "sentinel rows must name " + std::string(kBeginToken) + " or " +
                                std::string(kEndToken));
      }
    } else {
      try {
        loc = data.locations.intern(cells[2]);
      } catch (const InputError& e) {
        throw fail(line_no, e.what());
      }
    }

    std::pair<std::string, std::int64_t> key{cells[0], part};
    if (!have_current || key != current) {
      if (have_current) finished.insert(current);
      if (finished.count(key)) {
        throw fail(line_no, "rows of trail '" + cells[0] + "' are not grouped together");
      }
      current = key;
      have_current = true;
      Trail trail;
      trail.id = data.prepared ? cells[0] + "#" + std::to_string(part) : cells[0];
      data.trails.push_back(std::move(trail));
      if (data.prepared) data.partitions.push_back(PartitionTag{cells[0], static_cast<std::size_t>(part)});
    }
    auto& records = data.trails.back().records;
    if (!records.empty() && ticks < records.back().time.ticks) {
      throw fail(line_no, "timestamp decreases within trail '" + cells[0] + "'");
    }
    records.push_back(TrailRecord{loc, Timestamp{ticks}});
  }
  return data;
}

Dataset read_trails_csv(const std::filesystem::path& path, TimeUnit unit, LocationTable base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_trails_csv(in, unit, std::move(base), path.string());
}

void write_trails_csv(std::ostream& out, const Dataset& data) {
  out << (data.prepared ? "trail_id,timestamp,location,partition_idx,is_sentinel\n" : "trail_id,timestamp,location\n");
  for (std::size_t t = 0; t < data.trails.size(); ++t) {
    const auto& trail = data.trails[t];
    const std::string id = quote_csv(data.prepared ? data.partitions.at(t).origin_id : trail.id);
    for (const auto& rec : trail.records) {
      out << id << ',' << rec.time.ticks << ',' << quote_csv(data.locations.token(rec.location));
      if (data.prepared) out << ',' << data.partitions[t].index << ',' << (is_sentinel(rec.location) ? 1 : 0);
      out << '\n';
    }
  }
}

void write_trails_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_trails_csv(out, data);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

Json network_to_json(const TransitionNetwork& net, TimeUnit unit) {
  Json counts = Json::array();
  const auto n = static_cast<std::uint32_t>(net.size());
  std::uint64_t pairs = 0;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      const auto c = net.count(LocationId{a}, LocationId{b});
      if (c == 0) continue;
      counts.push_back({a, b, c});
      pairs += c;
    }
  }
  return Json{{"locations", net.locations().tokens()},
              {"counts", counts},
              {"smoothing", {{"mode", to_string(net.smoothing().mode)}, {"floor_prob", net.smoothing().floor_prob}}},
              {"metadata", {{"time_unit", to_string(unit)}, {"n_locations", n}, {"n_pairs", pairs}}}};
}

TransitionNetwork network_from_json(const Json& j) {
  try {
    const auto tokens = j.at("locations").get<std::vector<std::string>>();
    if (tokens.size() < 2 || tokens[0] != kBeginToken || tokens[1] != kEndToken) {
      throw InputError("network locations must start with the two sentinels");
    }
    LocationTable table;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      if (table.intern(tokens[i]).value != i) throw InputError("duplicate location '" + tokens[i] + "' in network");
    }
    TransitionCounts counts(table.size());
    for (const auto& triple : j.at("counts")) {
      const auto a = triple.at(0).get<std::uint32_t>();
      const auto b = triple.at(1).get<std::uint32_t>();
      if (a >= table.size() || b >= table.size()) throw InputError("network count refers to an unknown location");
      counts.add(LocationId{a}, LocationId{b}, triple.at(2).get<std::uint64_t>());
    }
    SmoothingPolicy smoothing;
    if (j.contains("smoothing")) {
      smoothing.mode = parse_smoothing_mode(j["smoothing"].at("mode").get<std::string>());
      smoothing.floor_prob = j["smoothing"].value("floor_prob", smoothing.floor_prob);
    }
    return TransitionNetwork(std::move(table), std::move(counts), smoothing);
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed network file: ") + e.what());
  }
}

Json hidden_to_json(const HiddenModel& model) {
  const std::size_t n = model.tokens.size();
  Json rows = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(std::vector<double>(model.transition.begin() + static_cast<std::ptrdiff_t>(i * n),
                                       model.transition.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
  }
  return Json{{"locations", model.tokens}, {"begin", model.begin}, {"end", model.end}, {"transition", rows}};
}

namespace {

Json tokens_of(std::span<const LocationId> seq, const LocationTable& locations) {
  Json out = Json::array();
  for (auto id : seq) out.push_back(locations.token(id));
  return out;
}

Json slots_of(const RunOrdering& run, const LocationTable& locations) {
  Json slots = Json::array();
  for (const auto& slot : run.slots) {
    slots.push_back({{"time", slot.time.ticks}, {"ordering", tokens_of(slot.ordering, locations)}});
  }
  return slots;
}

LocationId resolve(const std::string& token, LocationTable& locations) {
  if (token == kBeginToken) return kBegin;
  if (token == kEndToken) return kEnd;
  return locations.intern(token);
}

}  // namespace

Json orderings_to_json(std::span<const RunOrdering> runs, const LocationTable& locations) {
  Json out = Json::array();
  for (const auto& run : runs) {
    out.push_back({{"trail_id", run.trail_id}, {"run_index", run.run_index}, {"slots", slots_of(run, locations)}});
  }
  return Json{{"runs", out}};
}

std::vector<RunOrdering> orderings_from_json(const Json& j, LocationTable& locations) {
  try {
    std::vector<RunOrdering> runs;
    for (const auto& r : j.at("runs")) {
      RunOrdering run{r.at("trail_id").get<std::string>(), r.at("run_index").get<std::size_t>(), {}};
      for (const auto& s : r.at("slots")) {
        SlotOrdering slot{Timestamp{s.at("time").get<std::int64_t>()}, {}};
        for (const auto& token : s.at("ordering")) slot.ordering.push_back(resolve(token.get<std::string>(), locations));
        run.slots.push_back(std::move(slot));
      }
      runs.push_back(std::move(run));
    }
    return runs;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed orderings file: ") + e.what());
  }
}

Json results_to_json(std::span<const RunRecovery> runs, const LocationTable& locations, bool with_timings) {
  Json out = Json::array();
  for (const auto& run : runs) {
    Json entry{{"trail_id", run.recovered.trail_id},
               {"run_index", run.recovered.run_index},
               {"slots", slots_of(run.recovered, locations)},
               {"ordering", tokens_of(run.result.ordering, locations)},
               {"solver", to_string(run.result.solver)},
               {"status", to_string(run.status)},
               {"fell_back", run.fell_back},
               {"evaluated", run.result.evaluated}};
    entry["log_prob"] = std::isfinite(run.result.log_prob) ? Json(run.result.log_prob) : Json(nullptr);
    if (!run.message.empty()) entry["message"] = run.message;
    if (with_timings) {
      entry["elapsed_ms"] = std::chrono::duration<double, std::milli>(run.result.elapsed).count();
    }
    out.push_back(std::move(entry));
  }
  return Json{{"runs", out}};
}

Json report_to_json(const EvalReport& r) {
  return Json{{"n_broken_trails", r.n_broken_trails}, {"n_broken_points", r.n_broken_points},
              {"n_runs", r.n_runs},                   {"n_correct_points", r.n_correct_points},
              {"accuracy", r.accuracy},               {"avg_hamming", r.avg_hamming},
              {"avg_slot_hamming", r.avg_slot_hamming}, {"avg_bp_length", r.avg_bp_length},
              {"avg_run_length", r.avg_run_length},   {"avg_layers_per_run", r.avg_layers_per_run},
              {"max_bp_length", r.max_bp_length}};
}

EvalReport report_from_json(const Json& j) {
  try {
    EvalReport r;
    j.at("n_broken_trails").get_to(r.n_broken_trails);
    j.at("n_broken_points").get_to(r.n_broken_points);
    j.at("n_runs").get_to(r.n_runs);
    j.at("n_correct_points").get_to(r.n_correct_points);
    j.at("accuracy").get_to(r.accuracy);
    j.at("avg_hamming").get_to(r.avg_hamming);
    j.at("avg_slot_hamming").get_to(r.avg_slot_hamming);
    j.at("avg_bp_length").get_to(r.avg_bp_length);
    j.at("avg_run_length").get_to(r.avg_run_length);
    j.at("avg_layers_per_run").get_to(r.avg_layers_per_run);
    j.at("max_bp_length").get_to(r.max_bp_length);
    return r;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed report file: ") + e.what());
  }
}

std::string format_report(const EvalReport& r) {
  std::ostringstream out;
  auto row = [&out](const char* name, const auto& value) {
    out << std::left << std::setw(22) << name << value << '\n';
  };
  out << std::setprecision(6);
  row("broken trails", r.n_broken_trails);
  row("broken points", r.n_broken_points);
  row("runs", r.n_runs);
  row("correct points", r.n_correct_points);
  row("accuracy", r.accuracy);
  row("avg hamming (run)", r.avg_hamming);
  row("avg hamming (slot)", r.avg_slot_hamming);
  row("avg point length", r.avg_bp_length);
  row("avg run length", r.avg_run_length);
  row("avg layers per run", r.avg_layers_per_run);
  row("max point length", r.max_bp_length);
  return out.str();
}

Json rank_to_json(const RankReport& report) {
  Json j{{"ranking", report.ranking}, {"scores", report.scores}};
  j["spearman"] = report.spearman ? Json(*report.spearman) : Json(nullptr);
  return j;
}

RankReport rank_from_json(const Json& j) {
  try {
    RankReport r;
    j.at("ranking").get_to(r.ranking);
    j.at("scores").get_to(r.scores);
    if (j.contains("spearman") && !j["spearman"].is_null()) r.spearman = j["spearman"].get<double>();
    return r;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed rank file: ") + e.what());
  }
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace trailrec
