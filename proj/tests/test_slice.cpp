#include "cpaenum/deep.hpp"
#include "cpaenum/error.hpp"
#include "cpaenum/slice.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <regex>
#include <set>

using namespace cpaenum;

namespace {

// Largest |pre-activation| of the generating unit over points spread along each segment.
double worst_offset(const Network& net, const SliceSpec& spec, const SliceResult& s)
{
    double worst = 0.0;
    for (const SliceSegment& seg : s.segments)
        for (int t = 0; t <= 10; ++t) {
            const double a = t / 10.0;
            const Vector x = spec.lift(seg.u0 + a * (seg.u1 - seg.u0), seg.v0 + a * (seg.v1 - seg.v0));
            const ForwardResult f = forward(net, x);
            worst = std::max(worst, std::fabs(f.preactivations[seg.layer][seg.unit]));
        }
    return worst;
}

} // namespace

TEST_CASE("single layer segments lie on the hyperplanes")
{
    const std::size_t widths[] = {6};
    const Network net = random_network(2, widths, Activation::relu(), 3);
    const SliceSpec spec = SliceSpec::axis_aligned(2, 5.0);
    const SliceResult s = compute_slice(net, spec);
    REQUIRE_FALSE(s.segments.empty());
    for (const SliceSegment& seg : s.segments)
        for (int t = 0; t <= 10; ++t) {
            const double a = t / 10.0;
            const double u = seg.u0 + a * (seg.u1 - seg.u0);
            const double v = seg.v0 + a * (seg.v1 - seg.v0);
            const Layer& l = net.layer(0);
            CHECK(std::fabs(l.weights(seg.unit, 0) * u + l.weights(seg.unit, 1) * v + l.bias[seg.unit]) <= 1e-6);
        }
}

TEST_CASE("deep segments lie on composed hyperplanes")
{
    const std::size_t widths[] = {5, 5, 4};
    const Network net = random_network(2, widths, Activation::leaky_relu(0.1), 9);
    const SliceSpec spec = SliceSpec::axis_aligned(2, 4.0);
    const SliceResult s = compute_slice(net, spec);
    CHECK(worst_offset(net, spec, s) <= 1e-6);
    CHECK(s.partition.stats.region_count ==
          enumerate_network(net, Box::bounded(2, 4.0)).stats.region_count);
}

TEST_CASE("three layers use three colours")
{
    const std::size_t widths[] = {6, 6, 6};
    const Network net = random_network(2, widths, Activation::relu(), 1);
    const SliceSpec spec = SliceSpec::axis_aligned(2, 5.0);
    const SliceResult s = compute_slice(net, spec);
    std::set<int> layers;
    for (const auto& seg : s.segments)
        layers.insert(seg.layer);
    REQUIRE(layers.size() == 3);
    const std::string svg = slice_to_svg(s, net, spec);
    const std::regex stroke("stroke=\"(#[0-9a-f]{6})\"");
    std::set<std::string> colours;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), stroke); it != std::sregex_iterator(); ++it)
        colours.insert((*it)[1]);
    CHECK(colours == std::set<std::string>{"#000000", "#0000ff", "#ff0000"});
    CHECK(svg.find("<desc>regions: " + std::to_string(s.partition.stats.region_count) + ";") != std::string::npos);
}

TEST_CASE("oblique slice of a higher dimensional net")
{
    const std::size_t widths[] = {7, 5};
    const Network net = random_network(4, widths, Activation::relu(), 12);
    SliceSpec spec = SliceSpec::axis_aligned(4, 3.0);
    spec.anchor = {0.3, -0.2, 0.5, 0.1};
    spec.basis_u = {0.5, 0.5, 0.5, 0.5};
    spec.basis_v = {0.5, -0.5, 0.5, -0.5};
    const Network plane = restrict_to_plane(net, spec);
    for (double u : {-1.3, 0.2, 2.1})
        for (double v : {-2.0, 0.7}) {
            const Vector p{u, v};
            CHECK(oracle::relative_close(forward(plane, p).output, forward(net, spec.lift(u, v)).output, 1e-12));
        }
    const SliceResult s = compute_slice(net, spec);
    CHECK(worst_offset(net, spec, s) <= 1e-6);
    const auto grid = oracle::grid_keys(plane, 3.0, 600);
    std::set<std::string> exact;
    for (const auto& r : s.partition.regions)
        exact.insert(r.pattern.flat_key());
    for (const auto& k : grid)
        CHECK(exact.count(k) == 1);
}

TEST_CASE("slice input checks")
{
    const std::size_t widths[] = {3};
    const Network net = random_network(3, widths, Activation::relu(), 1);
    SliceSpec spec = SliceSpec::axis_aligned(3, 2.0);
    spec.basis_v = {1.0, 0.0, 0.0};
    CHECK_THROWS_AS(compute_slice(net, spec), InputError);
    spec = SliceSpec::axis_aligned(3, 2.0);
    spec.extent = 0.0;
    CHECK_THROWS_AS(compute_slice(net, spec), InputError);
    const std::size_t one[] = {2};
    CHECK_THROWS_AS(compute_slice(random_network(1, one, Activation::relu(), 1), SliceSpec::axis_aligned(2)),
                    InputError);
}
