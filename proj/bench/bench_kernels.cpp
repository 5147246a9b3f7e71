#include <benchmark/benchmark.h>

#include <map>

#include "isg/buckets.hpp"
#include "isg/kernels.hpp"

using namespace isg;

namespace {

Graph chordal_instance(int n) {
    return generate_instance(GenKind::RandomChordal, {.n = n, .p = 0.5}, 1234);
}

const TripodBuckets& cached_buckets(int n) {
    static std::map<int, TripodBuckets> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, tripod_buckets(chordal_instance(n), 6)).first;
    return it->second;
}

void BM_EnumerateTripods(benchmark::State& state) {
    Graph g = chordal_instance(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_tripods(g, 6));
}

void BM_ScoreSerial(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    Graph g = chordal_instance(n);
    const auto& tb = cached_buckets(n);
    auto rule = tripod_heavy_rule(Rational(1, 12));
    for (auto _ : state) benchmark::DoNotOptimize(heavy_scores_serial(g, tb.index, rule));
    state.counters["memberships"] = static_cast<double>(tb.index.total_memberships());
}

void BM_ScoreParallel(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    Graph g = chordal_instance(n);
    const auto& tb = cached_buckets(n);
    auto rule = tripod_heavy_rule(Rational(1, 12));
    for (auto _ : state) benchmark::DoNotOptimize(heavy_scores_parallel(g, tb.index, rule));
    state.counters["memberships"] = static_cast<double>(tb.index.total_memberships());
}

}  // namespace

BENCHMARK(BM_EnumerateTripods)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSerial)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreParallel)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
