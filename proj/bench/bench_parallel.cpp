// Serial reference vs OpenMP kernels on a mid-sized synthetic dataset.

#include <benchmark/benchmark.h>

#include "trailrec/analysis.hpp"
#include "trailrec/degrade.hpp"
#include "trailrec/preprocess.hpp"
#include "trailrec/recover.hpp"
#include "trailrec/synth.hpp"
#include "trailrec/transition.hpp"

using namespace trailrec;

namespace {

GeneratorSpec bench_spec() {
  GeneratorSpec g;
  g.n_trails = 1000;
  g.seed = 1;
  return g;
}

struct Fixture {
  Dataset raw;
  Dataset prepared;
  TransitionNetwork net;
  LocationNetwork movements;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    const auto raw = generate(bench_spec()).data;
    DegradeSpec d;
    d.resolution = 5;
    const auto prepared = prepare_dataset(degrade(raw, d).data, PrepareOptions{});
    auto net = extract(prepared.locations, prepared.trails);
    auto movements = build_network(raw.locations, raw.trails);
    return Fixture{raw, prepared, std::move(net), std::move(movements)};
  }();
  return f;
}

RecoverOptions recover_options() {
  RecoverOptions o;
  o.strategy = Strategy::acs;
  o.acs.iterations = 50;
  return o;
}

void BM_GenerateSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_serial(bench_spec()));
}
void BM_GenerateParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate(bench_spec()));
}

void BM_ExtractSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(extract_serial(f.prepared.locations, f.prepared.trails));
}
void BM_ExtractParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(extract(f.prepared.locations, f.prepared.trails));
}

void BM_RecoverSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto o = recover_options();
  for (auto _ : state) benchmark::DoNotOptimize(recover_dataset_serial(f.prepared, f.net, o));
}
void BM_RecoverParallel(benchmark::State& state) {
  const auto& f = fixture();
  const auto o = recover_options();
  for (auto _ : state) benchmark::DoNotOptimize(recover_dataset(f.prepared, f.net, o));
}

void BM_BetweennessSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(inverted_betweenness_serial(f.movements));
}
void BM_BetweennessParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(inverted_betweenness(f.movements));
}

}  // namespace

BENCHMARK(BM_GenerateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecoverSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecoverParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BetweennessSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BetweennessParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
