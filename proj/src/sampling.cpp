#include "cpaenum/sampling.hpp"

#include "cpaenum/deep.hpp"
#include "cpaenum/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace cpaenum {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_uniform(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53; // [0, 1)
}

void pattern_key_into(const Network& net, std::span<const double> x, std::string& key, Vector& a, Vector& b)
{
    key.clear();
    a.assign(x.begin(), x.end());
    for (const Layer& layer : net.layers()) {
        const std::size_t K = layer.output_width();
        b.resize(K);
        for (std::size_t k = 0; k < K; ++k) {
            const double h = dot(layer.weights.row(k), a) + layer.bias[k];
            if (layer.activation.sign_based())
                key.push_back(h >= 0.0 ? '+' : '-');
            b[k] = layer.activation.apply(h);
        }
        std::swap(a, b);
    }
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(seed + (stream + 1) * kGolden);
}

Vector sample_point(std::size_t dim, double half_width, std::uint64_t seed, std::uint64_t index)
{
    Vector x(dim);
    const std::uint64_t key = splitmix64(seed);
    for (std::size_t j = 0; j < dim; ++j) {
        const std::uint64_t counter = index * dim + j;
        x[j] = half_width * (2.0 * unit_uniform(splitmix64(key + (counter + 1) * kGolden)) - 1.0);
    }
    return x;
}

std::string pattern_key(const Network& net, std::span<const double> x)
{
    if (x.size() != net.input_dim())
        throw InputError("pattern_key: input dimension mismatch");
    std::string key;
    Vector a, b;
    pattern_key_into(net, x, key, a, b);
    return key;
}

SampleResult sample_discover(const Network& net, const Box& box, const SampleBudget& budget, std::uint64_t seed,
                             const SampleOptions& opts)
{
    if (!box.is_bounded())
        throw InputError("sample_discover: uniform sampling needs a bounded box");
    if (box.dim != net.input_dim())
        throw InputError("sample_discover: box dimension differs from network input dimension");
    if (budget.kind == SampleBudget::Kind::wall_seconds && !(budget.seconds >= 0.0))
        throw InputError("sample_discover: negative wall budget");

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    const std::size_t D = net.input_dim();
    const double h = *box.half_width;
    const int workers = std::max(1, opts.workers);
    const std::uint64_t max_batch = std::max<std::uint64_t>(1, opts.max_batch);

    SampleResult result;
    std::vector<std::string> keys;
    std::uint64_t next_checkpoint = 1;

    auto exhausted = [&] {
        if (budget.kind == SampleBudget::Kind::samples)
            return result.samples_drawn >= budget.samples;
        return elapsed() >= budget.seconds;
    };

    while (!exhausted()) {
        std::uint64_t batch = std::min(next_checkpoint - result.samples_drawn, max_batch);
        if (budget.kind == SampleBudget::Kind::samples)
            batch = std::min(batch, budget.samples - result.samples_drawn);
        keys.resize(batch);
        const std::uint64_t base = result.samples_drawn;

#pragma omp parallel num_threads(workers) if (batch >= 256 && workers > 1)
        {
            std::string key;
            Vector a, b;
#pragma omp for schedule(static)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(batch); ++i) {
                const Vector x = sample_point(D, h, seed, base + static_cast<std::uint64_t>(i));
                pattern_key_into(net, x, key, a, b);
                keys[static_cast<std::size_t>(i)] = key;
            }
        }
        for (auto& k : keys)
            result.patterns.insert(std::move(k));
        result.samples_drawn += batch;

        if (result.samples_drawn == next_checkpoint) {
            result.curve.points.push_back({elapsed(), result.samples_drawn, result.patterns.size()});
            next_checkpoint *= 2;
        }
    }
    if (result.samples_drawn > 0 &&
        (result.curve.points.empty() || result.curve.points.back().samples_drawn != result.samples_drawn))
        result.curve.points.push_back({elapsed(), result.samples_drawn, result.patterns.size()});
    return result;
}

ComparisonReport compare(const Network& net, const Box& box, int runs, std::uint64_t seed, const CompareOptions& opts)
{
    if (runs < 1)
        throw InputError("compare: runs must be >= 1");
    if (!box.is_bounded())
        throw InputError("compare: sampling needs a bounded box");

    ComparisonReport report;
    EnumerateOptions eo = opts.enumerate;
    eo.keep_regions = true;
    const auto t0 = std::chrono::steady_clock::now();
    const Partition part = enumerate_network(net, box, eo);
    report.enumeration_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!part.complete)
        throw NumericalError("compare: enumeration incomplete (" + part.diagnostics.front() + ")");
    report.enumeration_count = part.stats.region_count;

    std::unordered_set<std::string> enumerated;
    enumerated.reserve(part.regions.size());
    for (const Region& r : part.regions)
        enumerated.insert(r.pattern.flat_key());

    const SampleBudget budget = opts.fixed_samples > 0 ? SampleBudget::of_samples(opts.fixed_samples)
                                                       : SampleBudget::of_seconds(report.enumeration_time);
    for (int r = 0; r < runs; ++r) {
        const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        const SampleResult sr = sample_discover(net, box, budget, run_seed, opts.sample);
        for (const auto& key : sr.patterns)
            report.subsumption_violations += enumerated.count(key) ? 0 : 1;
        report.run_counts.push_back(sr.patterns.size());
        report.run_seeds.push_back(run_seed);
        report.run_samples.push_back(sr.samples_drawn);
    }

    report.sampling_runs = runs;
    const double n = static_cast<double>(runs);
    report.sampling_mean =
        std::accumulate(report.run_counts.begin(), report.run_counts.end(), 0.0,
                        [](double acc, std::uint64_t c) { return acc + static_cast<double>(c); }) / n;
    double ss = 0.0;
    for (auto c : report.run_counts)
        ss += (static_cast<double>(c) - report.sampling_mean) * (static_cast<double>(c) - report.sampling_mean);
    report.sampling_std = runs > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    report.percent_found = report.enumeration_count > 0
                               ? 100.0 * report.sampling_mean / static_cast<double>(report.enumeration_count)
                               : 100.0;

    report.config.input_dim = net.input_dim();
    for (const Layer& layer : net.layers())
        report.config.widths.push_back(layer.output_width());
    report.config.activation = std::string(to_string(net.layer(0).activation.kind));
    report.config.seed = seed;
    report.config.box_half_width = *box.half_width;
    report.config.budget_policy =
        opts.fixed_samples > 0 ? "samples:" + std::to_string(opts.fixed_samples) : std::string("matched_wall");
    return report;
}

} // namespace cpaenum
