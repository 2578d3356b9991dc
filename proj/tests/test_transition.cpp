#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "trailrec/error.hpp"
#include "trailrec/preprocess.hpp"
#include "trailrec/transition.hpp"

using namespace trailrec;
using oracle::make_trail;

namespace {

TransitionNetwork net_of(LocationTable& t, std::vector<Trail> trails, SmoothingPolicy s = {}) {
  return extract(t, trails, s);
}

}  // namespace

TEST(Extract, HandCountedProbabilities) {
  LocationTable t;
  std::vector<Trail> trails = {make_trail(t, "1", {{"B", 1}, {"A", 2}, {"B", 3}, {"C", 4}}),
                               make_trail(t, "2", {{"B", 1}, {"C", 2}})};
  auto net = net_of(t, trails);
  EXPECT_DOUBLE_EQ(net.prob(t.at("B"), t.at("C")), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(net.prob(t.at("B"), t.at("A")), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(net.prob(t.at("A"), t.at("B")), 1.0);
  EXPECT_EQ(net.out_total(t.at("C")), 0u);
  EXPECT_DOUBLE_EQ(net.prob(t.at("C"), t.at("A")), 0.0);
}

TEST(Extract, SinglePairIsCertain) {
  LocationTable t;
  auto net = net_of(t, {make_trail(t, "1", {{"A", 1}, {"B", 2}})});
  EXPECT_DOUBLE_EQ(net.prob(t.at("A"), t.at("B")), 1.0);
}

TEST(Extract, WorkedExampleCountsOnlyUnbrokenPairs) {
  LocationTable t;
  // Unbroken left-hand version of the worked example.
  auto left = make_trail(t, "l", {{"A", 1}, {"B", 2}, {"B", 3}, {"C", 4}, {"C", 5}, {"D", 6}, {"E", 7}});
  auto net = net_of(t, {left});
  EXPECT_DOUBLE_EQ(net.prob(t.at("B"), t.at("B")), 0.5);
  EXPECT_DOUBLE_EQ(net.prob(t.at("B"), t.at("C")), 0.5);

  // Broken version: only A->B survives (B@2 precedes the run, but B->member is excluded).
  auto right = make_trail(t, "r", {{"A", 1}, {"B", 2}, {"B", 3}, {"C", 3}, {"C", 4}, {"D", 4}, {"E", 5}});
  auto broken = net_of(t, {right});
  EXPECT_EQ(broken.count(t.at("A"), t.at("B")), 1u);
  EXPECT_EQ(broken.out_total(t.at("B")), 0u);
  EXPECT_EQ(broken.out_total(t.at("D")), 0u);
}

TEST(Extract, MatchesPairTallyOracle) {
  Rng rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    LocationTable t;
    std::vector<Trail> trails;
    for (int k = 0; k < 5; ++k) {
      Trail raw{"t" + std::to_string(k), {}};
      std::int64_t time = 0;
      const auto n = 1 + rng.index(15);
      for (std::uint64_t i = 0; i < n; ++i) {
        time += static_cast<std::int64_t>(rng.index(3) == 0 ? 0 : 1);
        raw.records.push_back({t.intern("L" + std::to_string(rng.index(4))), Timestamp{time}});
      }
      trails.push_back(add_sentinels(raw));
    }
    auto net = net_of(t, trails);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> expected;
    for (const auto& trail : trails) {
      for (auto [k, v] : oracle::pair_tally(trail)) expected[k] += v;
    }
    for (std::uint32_t a = 0; a < t.size(); ++a) {
      std::uint64_t row = 0;
      for (std::uint32_t b = 0; b < t.size(); ++b) {
        auto it = expected.find({a, b});
        EXPECT_EQ(net.count(LocationId{a}, LocationId{b}), it == expected.end() ? 0u : it->second);
        row += net.count(LocationId{a}, LocationId{b});
      }
      EXPECT_EQ(row, net.out_total(LocationId{a}));
      if (row > 0) {
        double sum = 0.0;
        for (std::uint32_t b = 0; b < t.size(); ++b) sum += net.prob(LocationId{a}, LocationId{b});
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
    }
    EXPECT_EQ(net.in_total(kBegin), 0u);
    EXPECT_EQ(net.out_total(kEnd), 0u);
  }
}

TEST(Extract, RejectsEmptyInputAndForeignLocations) {
  LocationTable t;
  EXPECT_THROW(extract(t, std::vector<Trail>{}), InputError);
  Trail bad{"b", {{LocationId{40}, Timestamp{0}}, {LocationId{41}, Timestamp{1}}}};
  EXPECT_THROW(extract(t, std::vector<Trail>{bad}), InputError);
  EXPECT_THROW(extract_serial(t, std::vector<Trail>{bad}), InputError);
}

TEST(NegLogDistance, Values) {
  LocationTable t;
  auto net = net_of(t, {make_trail(t, "1", {{"A", 1}, {"B", 2}, {"A", 3}, {"C", 4}})});
  const auto a = t.at("A"), b = t.at("B"), c = t.at("C");
  EXPECT_DOUBLE_EQ(net.neg_log_distance(b, a), 0.0);
  EXPECT_NEAR(net.neg_log_distance(a, b), std::log(2.0), 1e-15);
  EXPECT_EQ(net.neg_log_distance(c, a), std::numeric_limits<double>::infinity());
  EXPECT_THROW(net.neg_log_distance(LocationId{99}, a), InputError);

  auto floored = net.with_smoothing({SmoothingMode::floor, 1e-6});
  EXPECT_NEAR(floored.neg_log_distance(c, a), -std::log(1e-6), 1e-12);
  EXPECT_NEAR(floored.neg_log_distance(a, b), std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(floored.prob(c, a), 0.0);
}

TEST(Smoothing, FloorMustSitBelowObservedProbabilities) {
  LocationTable t;
  auto net = net_of(t, {make_trail(t, "1", {{"A", 1}, {"B", 2}, {"A", 3}, {"C", 4}})});
  EXPECT_DOUBLE_EQ(net.min_observed_prob(), 0.5);
  EXPECT_THROW(net.with_smoothing({SmoothingMode::floor, 0.5}), InputError);
  EXPECT_THROW(net.with_smoothing({SmoothingMode::floor, 0.0}), InputError);
  EXPECT_NO_THROW(net.with_smoothing({SmoothingMode::floor, 0.49}));
  EXPECT_EQ(parse_smoothing_mode("floor"), SmoothingMode::floor);
  EXPECT_THROW(parse_smoothing_mode("laplace"), InputError);
}

TEST(ScoreSequence, Basics) {
  LocationTable t;
  auto net = net_of(t, {add_sentinels(make_trail(t, "1", {{"A", 1}}))});
  const auto a = t.at("A");
  EXPECT_DOUBLE_EQ(score_sequence(net, std::vector<LocationId>{kBegin, a, kEnd}), 0.0);
  EXPECT_EQ(score_sequence(net, std::vector<LocationId>{kBegin, kEnd}), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(score_sequence(net, std::vector<LocationId>{a}), InputError);
}

// Sequences with the same multiset of transitions score the same.
TEST(ScoreSequence, TransitionMultisetTie) {
  Rng rng(9);
  for (int iter = 0; iter < 300; ++iter) {
    auto net = oracle::random_network(rng, 3, 0.0);
    const LocationId A{2}, B{3}, C{4};
    const std::vector<LocationId> s1{A, B, A, A, C, A}, s2{A, C, A, A, B, A};
    EXPECT_NEAR(score_sequence(net, s1), score_sequence(net, s2), 1e-12);
  }
}

TEST(ScoreSequence, MonotoneInDistance) {
  Rng rng(21);
  for (int iter = 0; iter < 300; ++iter) {
    auto net = oracle::random_network(rng, 4, 0.3);
    std::vector<LocationId> s1, s2;
    for (int k = 0; k < 5; ++k) {
      s1.push_back(LocationId{static_cast<std::uint32_t>(2 + rng.index(4))});
      s2.push_back(LocationId{static_cast<std::uint32_t>(2 + rng.index(4))});
    }
    double d1 = 0, d2 = 0;
    for (int k = 0; k + 1 < 5; ++k) {
      d1 += net.neg_log_distance(s1[k], s1[k + 1]);
      d2 += net.neg_log_distance(s2[k], s2[k + 1]);
    }
    EXPECT_EQ(score_sequence(net, s1) > score_sequence(net, s2), d1 < d2);
  }
}

TEST(TransitionNetwork, ExtendedToKeepsCounts) {
  LocationTable t;
  auto net = net_of(t, {make_trail(t, "1", {{"A", 1}, {"B", 2}})});
  LocationTable bigger = t;
  bigger.intern("Z");
  auto grown = net.extended_to(bigger);
  EXPECT_EQ(grown.size(), t.size() + 1);
  EXPECT_EQ(grown.count(t.at("A"), t.at("B")), 1u);
  EXPECT_EQ(grown.out_total(bigger.at("Z")), 0u);
  LocationTable other;
  other.intern("Q");
  EXPECT_THROW(net.extended_to(other), InputError);
}

TEST(TransitionCounts, MergeIsMatrixSum) {
  TransitionCounts a(4), b(4);
  a.add(LocationId{2}, LocationId{3}, 2);
  b.add(LocationId{2}, LocationId{3}, 5);
  b.add(LocationId{3}, LocationId{2});
  a.merge(b);
  EXPECT_EQ(a(LocationId{2}, LocationId{3}), 7u);
  EXPECT_EQ(a(LocationId{3}, LocationId{2}), 1u);
  EXPECT_THROW(a.merge(TransitionCounts(3)), InputError);
}
