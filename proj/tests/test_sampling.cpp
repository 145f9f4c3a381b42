#include "cpaenum/deep.hpp"
#include "cpaenum/error.hpp"
#include "cpaenum/sampling.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <set>

using namespace cpaenum;

namespace {

std::set<std::string> exact_keys(const Network& net, const Box& box)
{
    std::set<std::string> out;
    for (const auto& r : enumerate_network(net, box).regions)
        out.insert(r.pattern.flat_key());
    return out;
}

} // namespace

TEST_CASE("zero budget draws nothing")
{
    const std::size_t widths[] = {4};
    const Network net = random_network(2, widths, Activation::relu(), 1);
    const SampleResult r = sample_discover(net, Box::bounded(2, 10.0), SampleBudget::of_samples(0), 3);
    CHECK(r.patterns.empty());
    CHECK(r.curve.points.empty());
    CHECK(r.samples_drawn == 0);
}

TEST_CASE("a million samples find every region of four lines in the plane")
{
    const std::size_t widths[] = {4};
    const Network net = random_network(2, widths, Activation::leaky_relu(0.01), 7);
    const Box box = Box::bounded(2, 10.0);
    const std::set<std::string> exact = exact_keys(net, box);
    const SampleResult r = sample_discover(net, box, SampleBudget::of_samples(1000000), 5);
    CHECK(r.samples_drawn == 1000000);
    CHECK(r.patterns.size() == exact.size());
    for (const auto& k : r.patterns)
        CHECK(exact.count(k) == 1);
}

TEST_CASE("sampled patterns are enumerated patterns")
{
    const std::size_t widths[] = {8, 8};
    const Network net = random_network(3, widths, Activation::relu(), 17);
    const Box box = Box::bounded(3, 10.0);
    const std::set<std::string> exact = exact_keys(net, box);
    const SampleResult r = sample_discover(net, box, SampleBudget::of_samples(200000), 9);
    for (const auto& k : r.patterns)
        CHECK(exact.count(k) == 1);
}

TEST_CASE("pattern keys match the reference evaluation")
{
    const std::size_t widths[] = {5, 3};
    const Network net = random_network(4, widths, Activation::abs(), 3);
    for (std::uint64_t i = 0; i < 200; ++i) {
        const Vector x = sample_point(4, 2.0, 11, i);
        for (double v : x) {
            CHECK(v >= -2.0);
            CHECK(v <= 2.0);
        }
        CHECK(pattern_key(net, x) == oracle::evaluate(net, x).key);
    }
}

TEST_CASE("results do not depend on the worker count")
{
    const std::size_t widths[] = {12};
    const Network net = random_network(3, widths, Activation::relu(), 2);
    const Box box = Box::bounded(3, 10.0);
    SampleOptions one;
    SampleOptions many;
    many.workers = 8;
    const SampleResult a = sample_discover(net, box, SampleBudget::of_samples(50000), 4, one);
    const SampleResult b = sample_discover(net, box, SampleBudget::of_samples(50000), 4, many);
    CHECK(a.patterns == b.patterns);
    REQUIRE(a.curve.points.size() == b.curve.points.size());
    for (std::size_t i = 0; i < a.curve.points.size(); ++i) {
        CHECK(a.curve.points[i].samples_drawn == b.curve.points[i].samples_drawn);
        CHECK(a.curve.points[i].distinct_regions == b.curve.points[i].distinct_regions);
    }
}

TEST_CASE("discovery curve is monotone")
{
    const std::size_t widths[] = {16};
    const Network net = random_network(4, widths, Activation::relu(), 5);
    const SampleResult r = sample_discover(net, Box::bounded(4, 10.0), SampleBudget::of_samples(100000), 1);
    REQUIRE_FALSE(r.curve.points.empty());
    CHECK(r.curve.points.front().samples_drawn == 1);
    CHECK(r.curve.points.back().samples_drawn == 100000);
    CHECK(r.curve.points.back().distinct_regions == r.patterns.size());
    for (std::size_t i = 1; i < r.curve.points.size(); ++i) {
        CHECK(r.curve.points[i].samples_drawn > r.curve.points[i - 1].samples_drawn);
        CHECK(r.curve.points[i].distinct_regions >= r.curve.points[i - 1].distinct_regions);
        CHECK(r.curve.points[i].elapsed >= r.curve.points[i - 1].elapsed);
    }
}

TEST_CASE("wall budget stops")
{
    const std::size_t widths[] = {8};
    const Network net = random_network(2, widths, Activation::relu(), 5);
    const SampleResult r = sample_discover(net, Box::bounded(2, 10.0), SampleBudget::of_seconds(0.05), 1);
    CHECK(r.samples_drawn > 0);
    CHECK(r.curve.points.back().elapsed < 1.0);
}

TEST_CASE("saturated comparison reports full discovery")
{
    const std::size_t widths[] = {3};
    const Network net = random_network(2, widths, Activation::relu(), 3);
    CompareOptions opts;
    opts.fixed_samples = 200000;
    const ComparisonReport r = compare(net, Box::bounded(2, 10.0), 5, 42, opts);
    CHECK(r.percent_found == doctest::Approx(100.0));
    CHECK(r.sampling_std == 0.0);
    CHECK(r.subsumption_violations == 0);
    CHECK(r.sampling_runs == 5);
    REQUIRE(r.run_seeds.size() == 5);
    CHECK(std::set<std::uint64_t>(r.run_seeds.begin(), r.run_seeds.end()).size() == 5);
}

TEST_CASE("comparison statistics")
{
    const std::size_t widths[] = {16};
    const Network net = random_network(4, widths, Activation::relu(), 3);
    CompareOptions opts;
    opts.fixed_samples = 2000;
    const ComparisonReport r = compare(net, Box::bounded(4, 10.0), 4, 1, opts);
    REQUIRE(r.run_counts.size() == 4);
    double mean = 0.0;
    for (auto c : r.run_counts)
        mean += static_cast<double>(c) / 4.0;
    double var = 0.0;
    for (auto c : r.run_counts)
        var += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean) / 3.0;
    CHECK(r.sampling_mean == doctest::Approx(mean));
    CHECK(r.sampling_std == doctest::Approx(std::sqrt(var)));
    CHECK(r.percent_found == doctest::Approx(100.0 * mean / static_cast<double>(r.enumeration_count)));
    CHECK(r.config.budget_policy == "samples:2000");
}

TEST_CASE("sampling input checks")
{
    const std::size_t widths[] = {3};
    const Network net = random_network(2, widths, Activation::relu(), 1);
    CHECK_THROWS_AS(sample_discover(net, Box::unbounded(2), SampleBudget::of_samples(1), 0), InputError);
    CHECK_THROWS_AS(compare(net, Box::bounded(2, 1.0), 0, 0), InputError);
}
