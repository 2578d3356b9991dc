#include "trailrec/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "trailrec/error.hpp"

namespace trailrec {

namespace {

template <class A, class B>
std::size_t count_mismatches(const A& a, const B& b) {
  if (a.size() != b.size()) {
    throw InputError("hamming distance needs equal lengths (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

using SlotKey = std::pair<std::string, std::int64_t>;

std::string describe(const SlotKey& key) { return key.first + "@" + std::to_string(key.second); }

}  // namespace

std::size_t hamming(std::span<const LocationId> a, std::span<const LocationId> b) {
  return count_mismatches(a, b);
}

std::size_t hamming(std::string_view a, std::string_view b) { return count_mismatches(a, b); }

EvalReport evaluate(std::span<const RunOrdering> answers, std::span<const RunOrdering> recovered) {
  std::map<SlotKey, const SlotOrdering*> guessed;
  for (const auto& run : recovered) {
    for (const auto& slot : run.slots) {
      if (!guessed.emplace(SlotKey{run.trail_id, slot.time.ticks}, &slot).second) {
        throw InputError("duplicate recovered slot " + describe({run.trail_id, slot.time.ticks}));
      }
    }
  }

  std::set<SlotKey> seen;
  std::vector<std::string> missing;
  for (const auto& run : answers) {
    for (const auto& slot : run.slots) {
      SlotKey key{run.trail_id, slot.time.ticks};
      if (!seen.insert(key).second) throw InputError("duplicate answer slot " + describe(key));
      if (!guessed.count(key)) missing.push_back(describe(key));
    }
  }
  std::vector<std::string> extra;
  for (const auto& [key, slot] : guessed) {
    if (!seen.count(key)) extra.push_back(describe(key));
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "answers and results do not cover the same broken points";
    auto append = [&msg](const char* label, const std::vector<std::string>& keys) {
      if (keys.empty()) return;
      msg += std::string("; ") + label + ":";
      const std::size_t shown = std::min<std::size_t>(keys.size(), 10);
      for (std::size_t i = 0; i < shown; ++i) msg += " " + keys[i];
      if (keys.size() > shown) msg += " (+" + std::to_string(keys.size() - shown) + " more)";
    };
    append("missing from results", missing);
    append("not in answers", extra);
    throw InputError(msg);
  }

  EvalReport report;
  std::set<std::string> trails;
  std::size_t tokens = 0;
  std::size_t layers = 0;
  std::size_t run_hamming = 0;
  std::size_t slot_hamming = 0;
  for (const auto& run : answers) {
    if (run.slots.empty()) continue;
    trails.insert(run.trail_id);
    ++report.n_runs;
    std::vector<LocationId> truth;
    std::vector<LocationId> guess;
    for (const auto& slot : run.slots) {
      const auto& got = guessed.at({run.trail_id, slot.time.ticks})->ordering;
      const std::size_t d = hamming(got, slot.ordering);
      slot_hamming += d;
      report.n_correct_points += d == 0 ? 1 : 0;
      ++report.n_broken_points;
      report.max_bp_length = std::max(report.max_bp_length, slot.ordering.size());
      tokens += slot.ordering.size();
      truth.insert(truth.end(), slot.ordering.begin(), slot.ordering.end());
      guess.insert(guess.end(), got.begin(), got.end());
    }
    layers += run.slots.size();
    run_hamming += hamming(guess, truth);
  }
  report.n_broken_trails = trails.size();
  if (report.n_broken_points > 0) {
    const auto points = static_cast<double>(report.n_broken_points);
    const auto runs = static_cast<double>(report.n_runs);
    report.accuracy = static_cast<double>(report.n_correct_points) / points;
    report.avg_slot_hamming = static_cast<double>(slot_hamming) / points;
    report.avg_hamming = static_cast<double>(run_hamming) / runs;
    report.avg_bp_length = static_cast<double>(tokens) / points;
    report.avg_run_length = static_cast<double>(tokens) / runs;
    report.avg_layers_per_run = static_cast<double>(layers) / runs;
  }
  return report;
}

}  // namespace trailrec
