#include "trailrec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "trailrec/error.hpp"
#include "trailrec/rng.hpp"

namespace trailrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

/// Strict improvement of a path length (smaller is better) beyond the tie band.
bool shorter(double candidate, double incumbent) {
  if (std::isinf(candidate)) return false;
  if (std::isinf(incumbent)) return true;
  return candidate < incumbent - kScoreTieTolerance * std::max(1.0, std::abs(incumbent));
}

std::vector<LocationId> with_endpoints(const SolverInstance& inst, const std::vector<LocationId>& body) {
  std::vector<LocationId> out;
  out.reserve(body.size() + 2);
  if (inst.source()) out.push_back(*inst.source());
  out.insert(out.end(), body.begin(), body.end());
  if (inst.target()) out.push_back(*inst.target());
  return out;
}

RecoveryResult finish(const SolverInstance& inst, std::vector<LocationId> ordering, Strategy solver,
                      Clock::time_point started, std::uint64_t evaluated) {
  RecoveryResult result;
  result.log_prob = ordering.size() >= 2 ? score_sequence(inst.net(), ordering) : 0.0;
  result.ordering = std::move(ordering);
  result.solver = solver;
  result.evaluated = evaluated;
  result.infeasible = std::isinf(result.log_prob);
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - started);
  return result;
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::exact: return "exact";
    case Strategy::acs: return "acs";
    case Strategy::greedy: return "greedy";
    case Strategy::random: return "random";
  }
  return "exact";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "exact") return Strategy::exact;
  if (text == "acs") return Strategy::acs;
  if (text == "greedy") return Strategy::greedy;
  if (text == "random") return Strategy::random;
  throw InputError("unknown strategy '" + std::string(text) + "' (expected exact, acs, greedy or random)");
}

void AcsParams::validate() const {
  if (!(q0 >= 0.0 && q0 <= 1.0)) throw InputError("ACS q0 must lie in [0, 1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("ACS alpha must lie in (0, 1)");
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("ACS rho must lie in (0, 1)");
  if (!(tau0 > 0.0)) throw InputError("ACS tau0 must be positive");
  if (!(beta >= 0.0)) throw InputError("ACS beta must be non-negative");
  if (ants < 1) throw InputError("ACS needs at least one ant");
  if (iterations < 1) throw InputError("ACS needs at least one iteration");
}

// ---------------------------------------------------------------------------
// SolverInstance

SolverInstance::SolverInstance(const TransitionNetwork& net, std::optional<LocationId> source,
                               std::optional<LocationId> target, std::vector<std::vector<LocationId>> layers)
    : net_(&net), source_(source), target_(target), layers_(std::move(layers)) {
  if (layers_.empty()) throw InputError("solver instance needs at least one layer");
  const auto n = net.size();
  auto check = [n](LocationId id) {
    if (id.value >= n) throw InputError("solver instance refers to a location outside the network");
  };
  for (const auto& layer : layers_) {
    if (layer.empty()) throw InputError("solver instance has an empty layer");
    for (auto id : layer) check(id);
  }
  if (source_) check(*source_);
  if (target_) check(*target_);
}

SolverInstance SolverInstance::from_run(const TransitionNetwork& net, const Trail& trail, const BrokenRun& run) {
  std::vector<std::vector<LocationId>> layers;
  layers.reserve(run.layers.size());
  for (const auto& point : run.layers) {
    std::vector<LocationId> tokens;
    tokens.reserve(point.members.size());
    for (auto idx : point.members) tokens.push_back(trail.records.at(idx).location);
    layers.push_back(std::move(tokens));
  }
  std::optional<LocationId> source = run.source;
  std::optional<LocationId> target = run.target;
  if (run.source == kBegin && !net.has_begin_statistics()) source.reset();
  if (run.target == kEnd && !net.has_end_statistics()) target.reset();
  return SolverInstance(net, source, target, std::move(layers));
}

std::size_t SolverInstance::token_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.size();
  return n;
}

std::size_t SolverInstance::max_layer_size() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n = std::max(n, layer.size());
  return n;
}

std::uint64_t SolverInstance::ordering_bound() const {
  std::uint64_t bound = 1;
  for (const auto& layer : layers_) {
    for (std::uint64_t k = 2; k <= layer.size(); ++k) {
      if (bound > UINT64_MAX / k) return UINT64_MAX;
      bound *= k;
    }
  }
  return bound;
}

bool SolverInstance::is_feasible(std::span<const LocationId> ordering) const {
  const std::size_t expected = token_count() + (source_ ? 1 : 0) + (target_ ? 1 : 0);
  if (ordering.size() != expected) return false;
  std::size_t pos = 0;
  if (source_ && ordering[pos++] != *source_) return false;
  for (const auto& layer : layers_) {
    std::vector<LocationId> want(layer);
    std::vector<LocationId> got(ordering.begin() + static_cast<std::ptrdiff_t>(pos),
                                ordering.begin() + static_cast<std::ptrdiff_t>(pos + layer.size()));
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) return false;
    pos += layer.size();
  }
  return !target_ || ordering[pos] == *target_;
}

// ---------------------------------------------------------------------------
// LayeredGraph

LayeredGraph::LayeredGraph(const SolverInstance& instance) {
  const auto& layers = instance.layers();
  layer_nodes_.resize(layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    for (auto id : layers[k]) {
      layer_nodes_[k].push_back(locations_.size());
      locations_.push_back(id);
      layer_of_.push_back(k);
    }
  }

  const std::size_t m = locations_.size();
  const std::size_t n = m + 2;
  const std::size_t last = layers.size() - 1;
  const auto& net = instance.net();
  distances_.assign(n * n, kInf);

  auto set = [&](std::size_t from, std::size_t to, double d) { distances_[from * n + to] = d; };
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t li = layer_of_[i];
    if (li == 0) {
      set(source_node(), i, instance.source() ? net.neg_log_distance(*instance.source(), locations_[i]) : 0.0);
    }
    if (li == last) {
      set(i, target_node(), instance.target() ? net.neg_log_distance(locations_[i], *instance.target()) : 0.0);
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const std::size_t lj = layer_of_[j];
      if (lj == li || lj == li + 1) set(i, j, net.neg_log_distance(locations_[i], locations_[j]));
    }
  }
}

double LayeredGraph::path_length(std::span<const std::size_t> nodes) const {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) total += distance(nodes[k], nodes[k + 1]);
  return total;
}

// ---------------------------------------------------------------------------
// Exact enumeration

namespace {

/// Depth-first product of per-layer permutations. Layers are enumerated in
/// ascending lexicographic order (layer 0 most significant), so the first
/// optimum found is also the lexicographically smallest one.
class ExactSearch {
 public:
  explicit ExactSearch(const SolverInstance& inst) {
    // Local indices are assigned in LocationId order so that sorting local
    // indices sorts by interned index.
    std::vector<LocationId> ids;
    for (const auto& layer : inst.layers()) ids.insert(ids.end(), layer.begin(), layer.end());
    if (inst.source()) ids.push_back(*inst.source());
    if (inst.target()) ids.push_back(*inst.target());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    ids_ = ids;
    std::unordered_map<std::uint32_t, int> local;
    for (std::size_t i = 0; i < ids.size(); ++i) local[ids[i].value] = static_cast<int>(i);

    n_ = ids.size();
    dist_.resize(n_ * n_);
    for (std::size_t a = 0; a < n_; ++a) {
      for (std::size_t b = 0; b < n_; ++b) dist_[a * n_ + b] = inst.net().neg_log_distance(ids[a], ids[b]);
    }
    source_ = inst.source() ? local[inst.source()->value] : -1;
    target_ = inst.target() ? local[inst.target()->value] : -1;
    for (const auto& layer : inst.layers()) {
      std::vector<int> tokens;
      for (auto id : layer) tokens.push_back(local[id.value]);
      std::sort(tokens.begin(), tokens.end());
      layers_.push_back(std::move(tokens));
    }
    current_ = layers_;
    for (const auto& layer : layers_) used_.emplace_back(layer.size(), 0);
  }

  void run() { descend(0, source_, 0.0); }

  std::vector<LocationId> best_body() const {
    std::vector<LocationId> body;
    for (const auto& layer : best_) {
      for (int t : layer) body.push_back(ids_[static_cast<std::size_t>(t)]);
    }
    return body;
  }
  std::uint64_t evaluated() const { return evaluated_; }

 private:
  double d(int a, int b) const { return dist_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)]; }

  // Distinct permutations of each sorted layer are generated token by token
  // in lexicographic order. Distances are non-negative, so a prefix that can
  // no longer beat the incumbent by more than the tie band is cut off; the
  // first optimum found is the same one full enumeration would keep.
  bool hopeless(double partial) const { return has_best_ && !shorter(partial, best_length_); }

  void descend(std::size_t k, int prev, double partial) {
    if (k == layers_.size()) {
      const double total = partial + (target_ >= 0 ? d(prev, target_) : 0.0);
      ++evaluated_;
      if (!has_best_ || shorter(total, best_length_)) {
        has_best_ = true;
        best_length_ = total;
        best_ = current_;
      }
      return;
    }
    place(k, 0, prev, partial);
  }

  void place(std::size_t k, std::size_t pos, int prev, double partial) {
    const auto& layer = layers_[k];
    if (pos == layer.size()) {
      descend(k + 1, prev, partial);
      return;
    }
    auto& used = used_[k];
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (used[i] || (i > 0 && layer[i] == layer[i - 1] && !used[i - 1])) continue;
      const double next = partial + (prev >= 0 ? d(prev, layer[i]) : 0.0);
      if (hopeless(next)) continue;
      used[i] = 1;
      current_[k][pos] = layer[i];
      place(k, pos + 1, layer[i], next);
      used[i] = 0;
    }
  }

  std::vector<LocationId> ids_;
  std::size_t n_ = 0;
  std::vector<double> dist_;
  int source_ = -1;
  int target_ = -1;
  std::vector<std::vector<int>> layers_;
  std::vector<std::vector<int>> current_;
  std::vector<std::vector<char>> used_;
  std::vector<std::vector<int>> best_;
  double best_length_ = kInf;
  bool has_best_ = false;
  std::uint64_t evaluated_ = 0;
};

}  // namespace

RecoveryResult solve_exact(const SolverInstance& instance, std::uint64_t budget) {
  const auto started = Clock::now();
  const auto bound = instance.ordering_bound();
  if (bound > budget) {
    throw BudgetExceeded("exact solver needs up to " + std::to_string(bound) +
                         " enumerations, budget is " + std::to_string(budget));
  }
  ExactSearch search(instance);
  search.run();
  return finish(instance, with_endpoints(instance, search.best_body()), Strategy::exact, started,
                search.evaluated());
}

// ---------------------------------------------------------------------------
// Ant colony system

namespace {

/// Smallest distance used when turning a distance into visibility 1/d.
constexpr double kMinVisibleDistance = 1e-12;
/// Keeps the global-update deposit finite for zero-length tours.
constexpr double kQualityEpsilon = 1e-12;

class AntColony {
 public:
  AntColony(const LayeredGraph& graph, const AcsParams& params)
      : graph_(graph),
        params_(params),
        n_(graph.node_count()),
        m_(graph.token_count()),
        tau_(n_ * n_, params.tau0),
        visibility_(n_ * n_, 0.0),
        rng_(params.seed) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double d = graph.distance(i, j);
        if (!std::isinf(d)) visibility_[i * n_ + j] = std::pow(1.0 / std::max(d, kMinVisibleDistance), params.beta);
      }
    }
    visited_.resize(m_);
    remaining_.resize(graph.layer_nodes().size());
  }

  void run() {
    for (std::size_t it = 0; it < params_.iterations; ++it) {
      for (std::size_t ant = 0; ant < params_.ants; ++ant) {
        build_tour();
        ++tours_;
        const double length = graph_.path_length(tour_);
        if (best_.empty() || shorter(length, best_length_)) {
          best_length_ = length;
          best_ = tour_;
        }
      }
      global_update();
    }
  }

  const std::vector<std::size_t>& best() const { return best_; }
  std::uint64_t tours() const { return tours_; }

 private:
  struct Move {
    std::size_t node;
    bool forward;
    double weight;
  };

  double& tau(std::size_t i, std::size_t j) { return tau_[i * n_ + j]; }

  void local_update(std::size_t i, std::size_t j) {
    tau(i, j) = (1.0 - params_.rho) * tau(i, j) + params_.rho * params_.tau0;
  }

  void global_update() {
    const double deposit = std::isinf(best_length_) ? 0.0 : 1.0 / (best_length_ + kQualityEpsilon);
    for (std::size_t k = 0; k + 1 < best_.size(); ++k) {
      double& t = tau(best_[k], best_[k + 1]);
      t = (1.0 - params_.alpha) * t + params_.alpha * deposit;
    }
  }

  /// ACS transition rule: exploit the best move with probability q0,
  /// otherwise sample proportionally to tau * eta^beta.
  const Move& choose(const std::vector<Move>& moves) {
    double total = 0.0;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < moves.size(); ++i) {
      total += moves[i].weight;
      if (moves[i].weight > moves[argmax].weight) argmax = i;
    }
    const double q = rng_.uniform01();
    if (total <= 0.0) return moves[rng_.index(moves.size())];
    if (q < params_.q0) return moves[argmax];
    double r = rng_.uniform01() * total;
    for (const auto& move : moves) {
      r -= move.weight;
      if (r < 0.0) return move;
    }
    return moves.back();
  }

  /// Starts at a uniformly random token and grows the path in both
  /// directions. Each direction may only take unvisited tokens from its
  /// current layer until that layer is exhausted.
  void build_tour() {
    const auto& layers = graph_.layer_nodes();
    const std::size_t last = layers.size() - 1;
    std::fill(visited_.begin(), visited_.end(), 0);
    for (std::size_t k = 0; k < layers.size(); ++k) remaining_[k] = layers[k].size();

    const std::size_t start = static_cast<std::size_t>(rng_.index(m_));
    visited_[start] = 1;
    --remaining_[graph_.layer_of(start)];

    std::size_t tail = start;
    std::size_t head = start;
    std::size_t fwd_layer = graph_.layer_of(start);
    std::size_t bwd_layer = fwd_layer;
    bool fwd_done = false;
    bool bwd_done = false;
    forward_.clear();
    backward_.clear();

    while (!fwd_done || !bwd_done) {
      if (!fwd_done) {
        while (remaining_[fwd_layer] == 0 && fwd_layer < last) ++fwd_layer;
        if (remaining_[fwd_layer] == 0) {
          local_update(tail, graph_.target_node());
          forward_.push_back(graph_.target_node());
          fwd_done = true;
        }
      }
      if (!bwd_done) {
        while (remaining_[bwd_layer] == 0 && bwd_layer > 0) --bwd_layer;
        if (remaining_[bwd_layer] == 0) {
          local_update(graph_.source_node(), head);
          backward_.push_back(graph_.source_node());
          bwd_done = true;
        }
      }
      if (fwd_done && bwd_done) break;

      moves_.clear();
      if (!fwd_done) {
        for (auto j : layers[fwd_layer]) {
          if (!visited_[j]) moves_.push_back({j, true, tau(tail, j) * visibility_[tail * n_ + j]});
        }
      }
      if (!bwd_done) {
        for (auto j : layers[bwd_layer]) {
          if (!visited_[j]) moves_.push_back({j, false, tau(j, head) * visibility_[j * n_ + head]});
        }
      }
      if (moves_.empty()) continue;

      const Move move = choose(moves_);
      visited_[move.node] = 1;
      --remaining_[graph_.layer_of(move.node)];
      if (move.forward) {
        local_update(tail, move.node);
        forward_.push_back(move.node);
        tail = move.node;
      } else {
        local_update(move.node, head);
        backward_.push_back(move.node);
        head = move.node;
      }
    }

    tour_.assign(backward_.rbegin(), backward_.rend());
    tour_.push_back(start);
    tour_.insert(tour_.end(), forward_.begin(), forward_.end());
  }

  const LayeredGraph& graph_;
  const AcsParams& params_;
  std::size_t n_;
  std::size_t m_;
  std::vector<double> tau_;
  std::vector<double> visibility_;
  Rng rng_;

  std::vector<char> visited_;
  std::vector<std::size_t> remaining_;
  std::vector<std::size_t> forward_;
  std::vector<std::size_t> backward_;
  std::vector<std::size_t> tour_;
  std::vector<Move> moves_;

  std::vector<std::size_t> best_;
  double best_length_ = kInf;
  std::uint64_t tours_ = 0;
};

}  // namespace

RecoveryResult solve_acs(const SolverInstance& instance, const AcsParams& params) {
  params.validate();
  const auto started = Clock::now();
  const LayeredGraph graph(instance);
  AntColony colony(graph, params);
  colony.run();

  std::vector<LocationId> body;
  for (auto node : colony.best()) {
    if (node < graph.token_count()) body.push_back(graph.location(node));
  }
  return finish(instance, with_endpoints(instance, body), Strategy::acs, started, colony.tours());
}

// ---------------------------------------------------------------------------
// Greedy and random baselines

RecoveryResult solve_greedy(const SolverInstance& instance) {
  const auto started = Clock::now();
  const auto& net = instance.net();
  std::vector<LocationId> body;
  body.reserve(instance.token_count());
  std::optional<LocationId> current = instance.source();

  for (const auto& layer : instance.layers()) {
    std::vector<LocationId> remaining(layer);
    while (!remaining.empty()) {
      std::size_t pick = 0;
      double pick_d = kInf;
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        const double d = current ? net.neg_log_distance(*current, remaining[i]) : 0.0;
        const bool first = i == 0;
        if (first || d < pick_d || (d == pick_d && remaining[i] < remaining[pick])) {
          pick = i;
          pick_d = d;
        }
      }
      current = remaining[pick];
      body.push_back(remaining[pick]);
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }
  return finish(instance, with_endpoints(instance, body), Strategy::greedy, started, 1);
}

RecoveryResult solve_random(const SolverInstance& instance, std::uint64_t seed) {
  const auto started = Clock::now();
  Rng rng(seed);
  std::vector<LocationId> body;
  for (const auto& layer : instance.layers()) {
    std::vector<LocationId> perm(layer);
    rng.shuffle(std::span<LocationId>(perm));
    body.insert(body.end(), perm.begin(), perm.end());
  }
  return finish(instance, with_endpoints(instance, body), Strategy::random, started, 1);
}

}  // namespace trailrec
