#include "trailrec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

#include "trailrec/error.hpp"

namespace trailrec {

LocationNetwork::LocationNetwork(LocationTable locations)
    : locations_(std::move(locations)), n_(locations_.size()), weights_(n_ * n_, 0.0) {}

std::vector<LocationId> LocationNetwork::nodes() const {
  std::vector<LocationId> out;
  for (std::uint32_t i = 2; i < n_; ++i) out.push_back(LocationId{i});
  return out;
}

std::size_t LocationNetwork::index(LocationId id) const {
  if (id.value >= n_) throw InputError("location index " + std::to_string(id.value) + " out of range");
  return id.value;
}

void LocationNetwork::add(LocationId from, LocationId to, double weight) {
  if (is_sentinel(from) || is_sentinel(to)) throw InputError("sentinels are not network nodes");
  if (!(weight > 0.0)) throw InputError("edge weights must be positive");
  weights_[index(from) * n_ + index(to)] += weight;
}

double LocationNetwork::weight(LocationId from, LocationId to) const {
  return weights_[index(from) * n_ + index(to)];
}

double LocationNetwork::total_weight() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

LocationNetwork LocationNetwork::scaled(double c) const {
  if (!(c > 0.0)) throw InputError("scale factor must be positive");
  LocationNetwork out = *this;
  for (auto& w : out.weights_) w *= c;
  return out;
}

LocationNetwork build_network(const LocationTable& locations, std::span<const Trail> trails, bool skip_broken) {
  LocationNetwork net(locations);
  for (const auto& trail : trails) {
    const auto& recs = trail.records;
    std::vector<char> member(recs.size(), 0);
    if (skip_broken) {
      for (const auto& run : detect_broken_points(trail)) {
        for (const auto& layer : run.layers) {
          for (auto i : layer.members) member[i] = 1;
        }
      }
    }
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
      if (member[i] || member[i + 1]) continue;
      if (is_sentinel(recs[i].location) || is_sentinel(recs[i + 1].location)) continue;
      net.add(recs[i].location, recs[i + 1].location);
    }
  }
  return net;
}

namespace {

constexpr double kTieTolerance = 1e-12;

struct Adjacency {
  std::vector<std::vector<std::pair<std::size_t, double>>> out;
};

Adjacency adjacency_of(const LocationNetwork& net) {
  const std::size_t n = net.locations().size();
  Adjacency adj{std::vector<std::vector<std::pair<std::size_t, double>>>(n)};
  for (std::size_t a = 2; a < n; ++a) {
    for (std::size_t b = 2; b < n; ++b) {
      if (a == b) continue;
      const double w = net.weight(LocationId{static_cast<std::uint32_t>(a)}, LocationId{static_cast<std::uint32_t>(b)});
      if (w > 0.0) adj.out[a].emplace_back(b, 1.0 / w);
    }
  }
  return adj;
}

/// Brandes single-source pass: dependency of `s` on every node.
std::vector<double> dependencies(const Adjacency& adj, std::size_t s) {
  const std::size_t n = adj.out.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<double> sigma(n, 0.0);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::size_t> order;
  std::vector<char> done(n, 0);

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[s] = 0.0;
  sigma[s] = 1.0;
  queue.emplace(0.0, s);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (done[v] || d > dist[v]) continue;
    done[v] = 1;
    order.push_back(v);
    for (const auto& [w, len] : adj.out[v]) {
      if (done[w]) continue;
      const double alt = dist[v] + len;
      const double tol = kTieTolerance * std::max(alt, dist[w] == inf ? 0.0 : dist[w]);
      if (dist[w] == inf || alt < dist[w] - tol) {
        dist[w] = alt;
        sigma[w] = sigma[v];
        preds[w].assign(1, v);
        queue.emplace(alt, w);
      } else if (std::abs(alt - dist[w]) <= tol) {
        sigma[w] += sigma[v];
        preds[w].push_back(v);
      }
    }
  }

  std::vector<double> delta(n, 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t w = *it;
    for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
  }
  delta[s] = 0.0;
  return delta;
}

}  // namespace

std::vector<double> inverted_betweenness_serial(const LocationNetwork& net) {
  const auto adj = adjacency_of(net);
  const std::size_t n = adj.out.size();
  std::vector<double> score(n, 0.0);
  for (std::size_t s = 2; s < n; ++s) {
    const auto delta = dependencies(adj, s);
    for (std::size_t v = 0; v < n; ++v) score[v] += delta[v];
  }
  return score;
}

std::vector<double> inverted_betweenness(const LocationNetwork& net) {
  const auto adj = adjacency_of(net);
  const std::size_t n = adj.out.size();
  std::vector<std::vector<double>> rows(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 2; s < count; ++s) rows[s] = dependencies(adj, static_cast<std::size_t>(s));

  // Summing in source order keeps the result identical to the serial path.
  std::vector<double> score(n, 0.0);
  for (std::size_t s = 2; s < n; ++s) {
    for (std::size_t v = 0; v < n; ++v) score[v] += rows[s][v];
  }
  return score;
}

RankReport rank_locations(const LocationNetwork& net) {
  const auto score = inverted_betweenness(net);
  RankReport report;
  for (auto id : net.nodes()) {
    const auto& token = net.locations().token(id);
    report.scores[token] = score[id.value];
    report.ranking.push_back(token);
  }
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](const std::string& a, const std::string& b) {
    const double sa = report.scores.at(a);
    const double sb = report.scores.at(b);
    if (sa != sb) return sa > sb;
    return a < b;
  });
  return report;
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("spearman needs equally sized inputs");
  if (a.empty()) return 0.0;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double spearman(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  std::vector<double> va, vb;
  std::vector<std::string> mismatch;
  for (const auto& [token, score] : a) {
    auto it = b.find(token);
    if (it == b.end()) {
      mismatch.push_back(token);
      continue;
    }
    va.push_back(score);
    vb.push_back(it->second);
  }
  for (const auto& [token, score] : b) {
    if (!a.count(token)) mismatch.push_back(token);
  }
  if (!mismatch.empty()) {
    std::string msg = "rankings cover different locations:";
    for (std::size_t i = 0; i < std::min<std::size_t>(mismatch.size(), 10); ++i) msg += " " + mismatch[i];
    throw InputError(msg);
  }
  return spearman(va, vb);
}

}  // namespace trailrec
