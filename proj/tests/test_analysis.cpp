#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "trailrec/analysis.hpp"
#include "trailrec/error.hpp"

using namespace trailrec;
using oracle::make_trail;

namespace {

LocationNetwork from_matrix(const std::vector<std::vector<double>>& w) {
  LocationTable t;
  for (std::size_t i = 0; i < w.size(); ++i) t.intern("N" + std::to_string(i));
  LocationNetwork net(t);
  for (std::size_t a = 0; a < w.size(); ++a) {
    for (std::size_t b = 0; b < w.size(); ++b) {
      if (w[a][b] > 0) net.add(LocationId{static_cast<std::uint32_t>(a + 2)}, LocationId{static_cast<std::uint32_t>(b + 2)}, w[a][b]);
    }
  }
  return net;
}

}  // namespace

TEST(BuildNetwork, CountsMovements) {
  LocationTable t;
  std::vector<Trail> trails = {make_trail(t, "1", {{"A", 1}, {"B", 2}}), make_trail(t, "2", {{"A", 1}, {"B", 2}})};
  auto net = build_network(t, trails);
  EXPECT_DOUBLE_EQ(net.weight(t.at("A"), t.at("B")), 2.0);
  EXPECT_DOUBLE_EQ(net.total_weight(), 2.0);
  EXPECT_EQ(net.nodes().size(), 2u);
}

TEST(BuildNetwork, RecoveredTrailGivesOneEdgePerPair) {
  LocationTable t;
  auto trail = make_trail(t, "x", {{"A", 1}, {"B", 2}, {"B", 3}, {"C", 3}, {"C", 4}, {"D", 4}, {"E", 5}});
  auto net = build_network(t, std::vector<Trail>{trail});
  EXPECT_DOUBLE_EQ(net.total_weight(), 6.0);
  EXPECT_DOUBLE_EQ(net.weight(t.at("B"), t.at("B")), 1.0);
}

TEST(BuildNetwork, SkipBrokenMatchesPairTally) {
  Rng rng(13);
  for (int iter = 0; iter < 200; ++iter) {
    LocationTable t;
    std::vector<Trail> trails;
    for (int k = 0; k < 3; ++k) {
      Trail trail{"t" + std::to_string(k), {}};
      std::int64_t time = 0;
      for (std::uint64_t i = 0, n = 1 + rng.index(15); i < n; ++i) {
        time += rng.index(3) == 0 ? 0 : 1;
        trail.records.push_back({t.intern("L" + std::to_string(rng.index(4))), Timestamp{time}});
      }
      trails.push_back(trail);
    }
    auto net = build_network(t, trails, true);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> expected;
    double total = 0;
    for (const auto& trail : trails) {
      for (auto [k, v] : oracle::pair_tally(trail)) {
        expected[k] += v;
        total += static_cast<double>(v);
      }
    }
    EXPECT_DOUBLE_EQ(net.total_weight(), total);
    for (auto [k, v] : expected) EXPECT_DOUBLE_EQ(net.weight(LocationId{k.first}, LocationId{k.second}), static_cast<double>(v));
  }
}

TEST(BuildNetwork, SentinelsAreNotNodes) {
  LocationTable t;
  auto trail = make_trail(t, "s", {{"_BEGIN_", 1}, {"A", 1}, {"B", 2}, {"_END_", 2}});
  auto net = build_network(t, std::vector<Trail>{trail});
  EXPECT_DOUBLE_EQ(net.total_weight(), 1.0);
  EXPECT_THROW(net.add(kBegin, t.at("A")), InputError);
  EXPECT_THROW(net.add(t.at("A"), t.at("B"), 0.0), InputError);
}

TEST(InvertedBetweenness, PathGraph) {
  auto net = from_matrix({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  auto score = inverted_betweenness(net);
  EXPECT_DOUBLE_EQ(score[2], 0.0);
  EXPECT_DOUBLE_EQ(score[3], 1.0);
  EXPECT_DOUBLE_EQ(score[4], 0.0);
}

TEST(InvertedBetweenness, HeavierEdgesAreShorter) {
  // 0->2 directly with weight 1 (length 1) or via 1 with weights 4 (length 0.5).
  auto net = from_matrix({{0, 4, 1}, {0, 0, 4}, {0, 0, 0}});
  auto score = inverted_betweenness(net);
  EXPECT_DOUBLE_EQ(score[3], 1.0);
}

TEST(InvertedBetweenness, SplitsTiedPaths) {
  auto net = from_matrix({{0, 1, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 1}, {0, 0, 0, 0}});
  auto score = inverted_betweenness(net);
  EXPECT_DOUBLE_EQ(score[3], 0.5);
  EXPECT_DOUBLE_EQ(score[4], 0.5);
}

TEST(InvertedBetweenness, MatchesBruteForceOnRandomGraphs) {
  Rng rng(55);
  for (int iter = 0; iter < 300; ++iter) {
    const auto n = 2 + rng.index(5);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && rng.uniform01() < 0.5) w[a][b] = iter % 2 ? 1.0 + static_cast<double>(rng.index(3)) : 0.1 + rng.uniform01();
      }
    }
    auto got = inverted_betweenness(from_matrix(w));
    auto want = oracle::brute_betweenness(w);
    for (std::size_t v = 0; v < n; ++v) EXPECT_NEAR(got[v + 2], want[v], 1e-9);
  }
}

TEST(InvertedBetweenness, UniformScalingKeepsScores) {
  Rng rng(66);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::vector<double>> w(6, std::vector<double>(6, 0.0));
    for (auto& row : w) {
      for (auto& x : row) x = rng.uniform01() < 0.4 ? 1.0 + static_cast<double>(rng.index(4)) : 0.0;
    }
    auto net = from_matrix(w);
    auto base = rank_locations(net);
    for (double c : {0.5, 3.0, 7.25, 1000.0}) {
      auto scaled = rank_locations(net.scaled(c));
      EXPECT_EQ(scaled.ranking, base.ranking);
      for (const auto& [token, s] : base.scores) EXPECT_NEAR(scaled.scores.at(token), s, 1e-9);
    }
  }
  EXPECT_THROW(from_matrix({{0}}).scaled(0.0), InputError);
}

TEST(RankLocations, TiesBreakByToken) {
  auto net = from_matrix({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  auto report = rank_locations(net);
  EXPECT_EQ(report.ranking, (std::vector<std::string>{"N1", "N0", "N2"}));
  EXPECT_FALSE(report.spearman.has_value());
}

TEST(Spearman, Examples) {
  std::vector<double> a{1, 2, 3, 4, 5};
  std::vector<double> rev{5, 4, 3, 2, 1};
  std::vector<double> swapped{2, 1, 4, 3, 5};
  EXPECT_DOUBLE_EQ(spearman(a, a), 1.0);
  EXPECT_DOUBLE_EQ(spearman(a, rev), -1.0);
  EXPECT_NEAR(spearman(a, swapped), 0.8, 1e-12);
  EXPECT_THROW(spearman(a, std::vector<double>{1, 2}), InputError);
}

TEST(Spearman, AverageRanksForTies) {
  // Ranks (1.5, 1.5, 3) vs (1, 2, 3): Pearson on ranks.
  std::vector<double> a{10, 10, 20};
  std::vector<double> b{1, 2, 3};
  EXPECT_NEAR(spearman(a, b), 0.8660254037844386, 1e-12);
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 1, 1}, b), 0.0);
}

TEST(Spearman, Properties) {
  Rng rng(77);
  for (int iter = 0; iter < 500; ++iter) {
    const auto n = 2 + rng.index(10);
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = static_cast<double>(rng.index(5));
    for (auto& x : b) x = static_cast<double>(rng.index(5));
    const double ab = spearman(a, b);
    EXPECT_DOUBLE_EQ(ab, spearman(b, a));
    EXPECT_LE(std::abs(ab), 1.0);
    if (std::set<double>(a.begin(), a.end()).size() > 1) EXPECT_NEAR(spearman(a, a), 1.0, 1e-12);
  }
}

TEST(Spearman, ScoreMapsMustCoverSameLocations) {
  std::map<std::string, double> a{{"x", 1}, {"y", 2}}, b{{"x", 1}, {"z", 2}};
  EXPECT_THROW(spearman(a, b), InputError);
  EXPECT_DOUBLE_EQ(spearman(a, a), 1.0);
}
