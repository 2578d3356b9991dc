#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "trailrec/error.hpp"
#include "trailrec/recover.hpp"

using namespace trailrec;
using oracle::make_trail;

namespace {

TransitionNetwork training_net(LocationTable& t) {
  std::vector<Trail> trails = {
      add_sentinels(make_trail(t, "a", {{"A", 1}, {"B", 2}, {"C", 3}, {"D", 4}, {"E", 5}})),
      add_sentinels(make_trail(t, "b", {{"A", 1}, {"B", 2}, {"C", 3}, {"D", 4}, {"E", 5}})),
      add_sentinels(make_trail(t, "c", {{"B", 1}, {"C", 2}, {"D", 3}, {"A", 4}})),
  };
  return extract(t, trails);
}

std::vector<LocationId> locations_of(const Trail& trail) {
  std::vector<LocationId> out;
  for (const auto& r : trail.records) out.push_back(r.location);
  return out;
}

}  // namespace

TEST(RunStatus, RoundTrips) {
  for (auto s : {RunStatus::ok, RunStatus::infeasible, RunStatus::budget_exceeded, RunStatus::failed}) {
    EXPECT_EQ(parse_run_status(to_string(s)), s);
  }
  EXPECT_THROW(parse_run_status("meh"), InputError);
}

TEST(RecoverTrail, UnbrokenTrailIsUntouched) {
  LocationTable t;
  auto net = training_net(t);
  auto trail = add_sentinels(make_trail(t, "u", {{"A", 1}, {"B", 2}}));
  auto out = recover_trail(trail, net, RecoverOptions{});
  EXPECT_EQ(out.repaired, trail);
  EXPECT_TRUE(out.runs.empty());
}

TEST(RecoverTrail, RewritesRunInRecoveredOrder) {
  LocationTable t;
  auto net = training_net(t);
  auto trail = add_sentinels(make_trail(t, "x", {{"A", 1}, {"C", 2}, {"B", 2}, {"D", 3}, {"E", 4}}));
  auto out = recover_trail(trail, net, RecoverOptions{});
  ASSERT_EQ(out.runs.size(), 1u);
  const auto& run = out.runs[0];
  EXPECT_EQ(run.status, RunStatus::ok);
  EXPECT_EQ(run.recovered.slots.size(), 1u);
  EXPECT_EQ(run.recovered.slots[0].time.ticks, 2);
  EXPECT_EQ(run.recovered.slots[0].ordering, (std::vector<LocationId>{t.at("B"), t.at("C")}));
  EXPECT_EQ(out.repaired.records[2].location, t.at("B"));
  EXPECT_EQ(out.repaired.records[3].location, t.at("C"));
  for (std::size_t i = 0; i < trail.records.size(); ++i) EXPECT_EQ(out.repaired.records[i].time, trail.records[i].time);
}

TEST(RecoverTrail, ContinuousRunRespectsLayers) {
  LocationTable t;
  auto net = training_net(t);
  auto trail = add_sentinels(make_trail(t, "x", {{"A", 1}, {"B", 2}, {"B", 3}, {"C", 3}, {"C", 4}, {"D", 4}, {"E", 5}}));
  for (auto s : {Strategy::exact, Strategy::acs, Strategy::greedy, Strategy::random}) {
    RecoverOptions o;
    o.strategy = s;
    o.acs.iterations = 20;
    auto out = recover_trail(trail, net, o, 3);
    ASSERT_EQ(out.runs.size(), 1u);
    const auto& slots = out.runs[0].recovered.slots;
    ASSERT_EQ(slots.size(), 2u);
    auto first = slots[0].ordering, second = slots[1].ordering;
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    EXPECT_EQ(first, (std::vector<LocationId>{t.at("B"), t.at("C")}));
    EXPECT_EQ(second, (std::vector<LocationId>{t.at("C"), t.at("D")}));
  }
}

TEST(RecoverTrail, DisjointRunsSolvedIndependently) {
  LocationTable t;
  auto net = training_net(t);
  auto trail = add_sentinels(make_trail(t, "x", {{"B", 1}, {"A", 1}, {"C", 2}, {"E", 3}, {"D", 3}}));
  auto out = recover_trail(trail, net, RecoverOptions{});
  ASSERT_EQ(out.runs.size(), 2u);
  EXPECT_EQ(out.runs[0].recovered.run_index, 0u);
  EXPECT_EQ(out.runs[1].recovered.run_index, 1u);
}

TEST(SolveInstance, BudgetFallbackAndReporting) {
  LocationTable t;
  auto net = training_net(t);
  SolverInstance inst(net, kBegin, kEnd, {{t.at("A"), t.at("B"), t.at("C"), t.at("D")}});
  RecoverOptions o;
  o.exact_budget = 5;
  o.acs.iterations = 10;
  auto fell = solve_instance(inst, o, 1);
  EXPECT_TRUE(fell.fell_back);
  EXPECT_EQ(fell.result.solver, Strategy::acs);
  EXPECT_EQ(fell.status, RunStatus::ok);
  EXPECT_FALSE(fell.message.empty());

  o.exact_fallback_to_acs = false;
  auto kept = solve_instance(inst, o, 1);
  EXPECT_EQ(kept.status, RunStatus::budget_exceeded);
  EXPECT_EQ(kept.result.ordering,
            (std::vector<LocationId>{kBegin, t.at("A"), t.at("B"), t.at("C"), t.at("D"), kEnd}));
}

TEST(SolveInstance, InfeasibleIsFlagged) {
  LocationTable t;
  auto net = training_net(t);
  SolverInstance inst(net, t.at("E"), kEnd, {{t.at("A"), t.at("B")}});
  auto r = solve_instance(inst, RecoverOptions{}, 0);
  EXPECT_EQ(r.status, RunStatus::infeasible);
  EXPECT_TRUE(r.result.infeasible);
}

TEST(SolverInstance, EndpointsOpenWithoutSentinelStatistics) {
  LocationTable t;
  std::vector<Trail> bare = {make_trail(t, "a", {{"A", 1}, {"B", 2}, {"C", 3}})};
  auto net = extract(t, bare);
  auto trail = make_trail(t, "x", {{"B", 1}, {"A", 1}});
  auto inst = SolverInstance::from_run(net, trail, detect_broken_points(trail).at(0));
  EXPECT_FALSE(inst.source().has_value());
  EXPECT_FALSE(inst.target().has_value());
  auto r = solve_exact(inst);
  EXPECT_EQ(r.ordering, (std::vector<LocationId>{t.at("A"), t.at("B")}));

  // Real endpoints are kept even when the sentinels are open.
  auto inner = make_trail(t, "y", {{"A", 1}, {"C", 2}, {"B", 2}, {"C", 3}});
  auto inst2 = SolverInstance::from_run(net, inner, detect_broken_points(inner).at(0));
  EXPECT_EQ(inst2.source(), t.at("A"));
  EXPECT_EQ(inst2.target(), t.at("C"));
}

TEST(RecoverDataset, RawInputIsPreparedAndMappedBack) {
  LocationTable t;
  auto net = training_net(t);
  Dataset raw;
  raw.locations = t;
  raw.trails = {make_trail(raw.locations, "r", {{"A", 1}, {"C", 2}, {"B", 2}, {"D", 3}, {"E", 100}, {"C", 101}, {"B", 101}})};
  auto out = recover_dataset(raw, net, RecoverOptions{});
  EXPECT_FALSE(out.repaired.prepared);
  ASSERT_EQ(out.repaired.trails.size(), 1u);
  EXPECT_EQ(out.repaired.trails[0].records.size(), 7u);
  ASSERT_EQ(out.runs.size(), 2u);
  EXPECT_EQ(out.runs[0].recovered.trail_id, "r");
  EXPECT_EQ(out.runs[1].recovered.trail_id, "r");
  EXPECT_EQ(out.runs[0].recovered.run_index, 0u);
  EXPECT_EQ(out.runs[1].recovered.run_index, 1u);
  EXPECT_EQ(locations_of(out.repaired.trails[0])[1], t.at("B"));

  // Same answer when the caller prepares first.
  auto prepared = prepare_dataset(raw, PrepareOptions{});
  auto via = recover_dataset(prepared, net, RecoverOptions{});
  EXPECT_TRUE(via.repaired.prepared);
  ASSERT_EQ(via.runs.size(), 2u);
  EXPECT_EQ(via.runs[1].recovered.trail_id, "r");
  EXPECT_EQ(via.runs[1].recovered.run_index, 1u);
  EXPECT_EQ(via.runs[0].recovered.slots, out.runs[0].recovered.slots);
  EXPECT_EQ(join_partitions(via.repaired).trails, out.repaired.trails);
}

TEST(RecoverDataset, UnknownLocationsGetEmptyRows) {
  LocationTable t;
  auto net = training_net(t);
  Dataset raw;
  raw.locations = t;
  raw.trails = {make_trail(raw.locations, "r", {{"A", 1}, {"Q", 2}, {"B", 2}, {"C", 3}})};
  auto out = recover_dataset(raw, net, RecoverOptions{});
  ASSERT_EQ(out.runs.size(), 1u);
  EXPECT_EQ(out.runs[0].status, RunStatus::infeasible);
}
