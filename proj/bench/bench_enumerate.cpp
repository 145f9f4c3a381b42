#include "cpaenum/deep.hpp"
#include "cpaenum/sampling.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

#include <algorithm>

namespace {

using namespace cpaenum;

Network bench_network(std::size_t dim, std::size_t width)
{
    const std::size_t widths[] = {width};
    return random_network(dim, widths, Activation{ActivationKind::relu}, 7);
}

// Args: input dim, width, workers (1 = serial reference).
void BM_Enumerate(benchmark::State& state)
{
    const auto dim = static_cast<std::size_t>(state.range(0));
    const Network net = bench_network(dim, static_cast<std::size_t>(state.range(1)));
    EnumerateOptions opts;
    opts.workers = static_cast<int>(state.range(2));
    opts.keep_regions = false;
    std::uint64_t regions = 0;
    for (auto _ : state) {
        const Partition p = enumerate_network(net, Box::bounded(dim, 10.0), opts);
        regions = p.stats.region_count;
        benchmark::DoNotOptimize(regions);
    }
    state.counters["regions"] = static_cast<double>(regions);
}

void BM_Sample(benchmark::State& state)
{
    const auto dim = static_cast<std::size_t>(state.range(0));
    const Network net = bench_network(dim, static_cast<std::size_t>(state.range(1)));
    SampleOptions opts;
    opts.workers = static_cast<int>(state.range(2));
    for (auto _ : state) {
        const SampleResult r = sample_discover(net, Box::bounded(dim, 10.0), SampleBudget::of_samples(1 << 16), 3, opts);
        benchmark::DoNotOptimize(r.patterns.size());
    }
}

void worker_args(benchmark::internal::Benchmark* b)
{
    const int workers = std::max(2, omp_get_max_threads());
    for (auto [dim, width] : {std::pair{2, 32}, std::pair{4, 24}}) {
        b->Args({dim, width, 1});
        b->Args({dim, width, workers});
    }
}

} // namespace

BENCHMARK(BM_Enumerate)->Apply(worker_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sample)->Apply(worker_args)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
