#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trailrec/trail.hpp"

namespace trailrec {

/// Directed movement-count network over the real locations of a table.
/// Sentinels are never nodes; self-loops are kept.
class LocationNetwork {
 public:
  explicit LocationNetwork(LocationTable locations);

  const LocationTable& locations() const { return locations_; }
  /// Every non-sentinel location, in index order.
  std::vector<LocationId> nodes() const;

  void add(LocationId from, LocationId to, double weight = 1.0);
  double weight(LocationId from, LocationId to) const;
  double total_weight() const;

  /// Copy with every weight multiplied by c > 0.
  LocationNetwork scaled(double c) const;

 private:
  std::size_t index(LocationId id) const;

  LocationTable locations_;
  std::size_t n_;
  std::vector<double> weights_;
};

/// Tallies consecutive movements between real locations. With `skip_broken`,
/// pairs touching a broken-point member are ignored.
LocationNetwork build_network(const LocationTable& locations, std::span<const Trail> trails,
                              bool skip_broken = false);

/// Weighted betweenness with edge length 1/weight, per location index
/// (sentinel entries are 0). Sources run in parallel; the result does not
/// depend on the thread count.
std::vector<double> inverted_betweenness(const LocationNetwork& net);

/// Single-threaded reference for inverted_betweenness().
std::vector<double> inverted_betweenness_serial(const LocationNetwork& net);

struct RankReport {
  /// Tokens by descending score, ties by token.
  std::vector<std::string> ranking;
  std::map<std::string, double> scores;
  std::optional<double> spearman;
};

RankReport rank_locations(const LocationNetwork& net);

/// Spearman correlation with average ranks for ties; 0 when either side is
/// constant. Throws InputError on length mismatch.
double spearman(std::span<const double> a, std::span<const double> b);

/// Correlation of two score maps over the same token set.
double spearman(const std::map<std::string, double>& a, const std::map<std::string, double>& b);

}  // namespace trailrec
