#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the solver or analysis code they are checked against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trailrec/rng.hpp"
#include "trailrec/trail.hpp"
#include "trailrec/transition.hpp"

namespace oracle {

using trailrec::LocationId;

/// Builds a trail from (token, tick) pairs, interning into `table`.
inline trailrec::Trail make_trail(trailrec::LocationTable& table, std::string id,
                                  std::vector<std::pair<std::string, std::int64_t>> recs) {
  trailrec::Trail t{std::move(id), {}};
  for (auto& [tok, time] : recs) {
    LocationId loc = tok == trailrec::kBeginToken ? trailrec::kBegin
                     : tok == trailrec::kEndToken ? trailrec::kEnd
                                                  : table.intern(tok);
    t.records.push_back({loc, trailrec::Timestamp{time}});
  }
  return t;
}

/// Counts consecutive pairs straight from the records, skipping any pair
/// whose records share a timestamp with a differing-location neighbour.
inline std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> pair_tally(const trailrec::Trail& trail) {
  const auto& r = trail.records;
  std::vector<bool> broken(r.size(), false);
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::vector<std::uint32_t> locs;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j].time == r[i].time && !trailrec::is_sentinel(r[j].location)) locs.push_back(r[j].location.value);
    }
    std::sort(locs.begin(), locs.end());
    locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
    broken[i] = locs.size() >= 2 && !trailrec::is_sentinel(r[i].location);
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> tally;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (!broken[i] && !broken[i + 1]) ++tally[{r[i].location.value, r[i + 1].location.value}];
  }
  return tally;
}

/// log P(b|a) from raw counts, -inf when unseen.
inline double log_p(const trailrec::TransitionNetwork& net, LocationId a, LocationId b) {
  std::uint64_t total = 0;
  for (std::uint32_t k = 0; k < net.size(); ++k) total += net.count(a, LocationId{k});
  const auto c = net.count(a, b);
  if (c == 0 || total == 0) {
    if (net.smoothing().mode == trailrec::SmoothingMode::floor) return std::log(net.smoothing().floor_prob);
    return -std::numeric_limits<double>::infinity();
  }
  return std::log(static_cast<double>(c) / static_cast<double>(total));
}

struct Best {
  std::vector<LocationId> ordering;
  double score = -std::numeric_limits<double>::infinity();
  std::size_t candidates = 0;
};

/// All orderings of every layer (Heap-free: recursive pick-one), scored
/// from raw counts; ties within `tol` go to the lexicographically smallest.
inline Best naive_best(const trailrec::TransitionNetwork& net, std::optional<LocationId> source,
                       std::optional<LocationId> target, const std::vector<std::vector<LocationId>>& layers,
                       double tol = 1e-12) {
  std::vector<std::vector<LocationId>> all;
  std::vector<LocationId> prefix;
  if (source) prefix.push_back(*source);

  std::function<void(std::size_t, std::vector<LocationId>)> rec_layer;
  std::function<void(std::size_t, std::vector<LocationId>&, std::vector<LocationId>)> pick;
  pick = [&](std::size_t layer, std::vector<LocationId>& seq, std::vector<LocationId> remaining) {
    if (remaining.empty()) {
      rec_layer(layer + 1, seq);
      return;
    }
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      auto rest = remaining;
      seq.push_back(rest[i]);
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      pick(layer, seq, rest);
      seq.pop_back();
    }
  };
  rec_layer = [&](std::size_t layer, std::vector<LocationId> seq) {
    if (layer == layers.size()) {
      if (target) seq.push_back(*target);
      all.push_back(seq);
      return;
    }
    pick(layer, seq, layers[layer]);
  };
  rec_layer(0, prefix);

  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  Best best;
  best.candidates = all.size();
  std::vector<double> scores;
  for (const auto& seq : all) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) s += log_p(net, seq[i], seq[i + 1]);
    scores.push_back(s);
    best.score = std::max(best.score, s);
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    const bool tie = std::isinf(best.score) ? scores[i] == best.score
                                            : std::abs(scores[i] - best.score) <= tol * std::max(1.0, std::abs(best.score));
    if (tie) {
      best.ordering = all[i];
      best.score = scores[i];
      break;
    }
  }
  return best;
}

/// Betweenness by enumerating every simple path between every ordered pair.
/// `w[a][b]` > 0 is an edge of length 1/w.
inline std::vector<double> brute_betweenness(const std::vector<std::vector<double>>& w, double tol = 1e-12) {
  const std::size_t n = w.size();
  std::vector<double> score(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t) continue;
      std::vector<std::pair<double, std::vector<std::size_t>>> paths;
      std::vector<std::size_t> path{s};
      std::vector<bool> on(n, false);
      on[s] = true;
      std::function<void(std::size_t, double)> dfs = [&](std::size_t v, double len) {
        if (v == t) {
          paths.emplace_back(len, path);
          return;
        }
        for (std::size_t u = 0; u < n; ++u) {
          if (on[u] || u == v || w[v][u] <= 0.0) continue;
          on[u] = true;
          path.push_back(u);
          dfs(u, len + 1.0 / w[v][u]);
          path.pop_back();
          on[u] = false;
        }
      };
      dfs(s, 0.0);
      if (paths.empty()) continue;
      double shortest = std::numeric_limits<double>::infinity();
      for (const auto& p : paths) shortest = std::min(shortest, p.first);
      std::vector<const std::vector<std::size_t>*> best;
      for (const auto& p : paths) {
        if (p.first <= shortest * (1.0 + tol)) best.push_back(&p.second);
      }
      for (const auto* p : best) {
        for (std::size_t k = 1; k + 1 < p->size(); ++k) score[(*p)[k]] += 1.0 / static_cast<double>(best.size());
      }
    }
  }
  return score;
}

/// Random network over `n` real locations (plus sentinels). Roughly
/// `zero_share` of the real-to-real counts are left at zero.
inline trailrec::TransitionNetwork random_network(trailrec::Rng& rng, std::size_t n, double zero_share,
                                                  bool with_sentinels = true) {
  trailrec::LocationTable table;
  for (std::size_t i = 0; i < n; ++i) table.intern("X" + std::to_string(i));
  trailrec::TransitionCounts counts(table.size());
  for (std::uint32_t a = 0; a < table.size(); ++a) {
    if (a == trailrec::kEnd.value) continue;
    if (a == trailrec::kBegin.value && !with_sentinels) continue;
    for (std::uint32_t b = 0; b < table.size(); ++b) {
      if (b == trailrec::kBegin.value) continue;
      if (b == trailrec::kEnd.value && !with_sentinels) continue;
      if (a == trailrec::kBegin.value && b == trailrec::kEnd.value) continue;
      if (rng.uniform01() < zero_share) continue;
      counts.add(LocationId{a}, LocationId{b}, 1 + rng.index(50));
    }
  }
  return trailrec::TransitionNetwork(table, counts);
}

}  // namespace oracle
