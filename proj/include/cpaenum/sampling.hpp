#pragma once

#include "cpaenum/arrangement.hpp"
#include "cpaenum/network.hpp"

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

namespace cpaenum {

struct SampleBudget {
    enum class Kind { samples, wall_seconds };
    Kind kind = Kind::samples;
    std::uint64_t samples = 0;
    double seconds = 0.0;

    static SampleBudget of_samples(std::uint64_t n) { return {Kind::samples, n, 0.0}; }
    static SampleBudget of_seconds(double s) { return {Kind::wall_seconds, 0, s}; }
};

struct CurvePoint {
    double elapsed = 0.0;
    std::uint64_t samples_drawn = 0;
    std::uint64_t distinct_regions = 0;
};

struct DiscoveryCurve {
    std::vector<CurvePoint> points; // checkpoints at 1, 2, 4, ... samples plus the final count
};

struct SampleResult {
    std::unordered_set<std::string> patterns; // flat sign keys, see DeepSignPattern::flat_key
    DiscoveryCurve curve;
    std::uint64_t samples_drawn = 0;
};

struct SampleOptions {
    int workers = 1;
    std::uint64_t max_batch = 4096;
};

// Uniform samples from the (bounded) box; x_i of sample n is drawn from a SplitMix64 counter stream
// keyed by seed, so results do not depend on the worker count.
SampleResult sample_discover(const Network& net, const Box& box, const SampleBudget& budget, std::uint64_t seed,
                             const SampleOptions& opts = {});

// Coordinates of sample `index` (exposed for tests).
Vector sample_point(std::size_t dim, double half_width, std::uint64_t seed, std::uint64_t index);

// Flat '+'/'-' key of x's activation pattern, computed without building a DeepSignPattern.
std::string pattern_key(const Network& net, std::span<const double> x);

struct ComparisonConfig {
    std::size_t input_dim = 0;
    std::vector<std::size_t> widths;
    std::string activation;
    std::uint64_t seed = 0;
    double box_half_width = 0.0;
    std::string budget_policy; // "matched_wall" or "samples:<n>"
};

struct ComparisonReport {
    std::uint64_t enumeration_count = 0;
    double enumeration_time = 0.0;
    double sampling_mean = 0.0;
    double sampling_std = 0.0;
    int sampling_runs = 0;
    double percent_found = 0.0;
    std::vector<std::uint64_t> run_counts;
    std::vector<std::uint64_t> run_seeds;
    std::vector<std::uint64_t> run_samples;
    // Sampled patterns missing from the enumeration, summed over runs. Expected 0.
    std::uint64_t subsumption_violations = 0;
    ComparisonConfig config;
};

struct CompareOptions {
    EnumerateOptions enumerate;
    SampleOptions sample;
    // 0 matches the sampling wall budget to the enumeration time; otherwise a fixed sample count.
    std::uint64_t fixed_samples = 0;
};

// Exact enumeration once, then `runs` sampling runs with seeds derived from `seed`.
ComparisonReport compare(const Network& net, const Box& box, int runs, std::uint64_t seed,
                         const CompareOptions& opts = {});

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace cpaenum
