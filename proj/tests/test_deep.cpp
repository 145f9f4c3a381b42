#include "cpaenum/deep.hpp"
#include "cpaenum/error.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <set>

using namespace cpaenum;

namespace {

std::vector<std::string> signs(const Partition& p)
{
    std::vector<std::string> out;
    for (const auto& r : p.regions)
        out.push_back(r.pattern.signs_string() + "/" + r.pattern.redundant_string());
    return out;
}

std::set<std::string> flat_keys(const Partition& p)
{
    std::set<std::string> out;
    for (const auto& r : p.regions)
        out.insert(r.pattern.flat_key());
    return out;
}

} // namespace

TEST_CASE("constant pre-activation does not subdivide")
{
    const SubdivisionFrame root = root_frame(2, Box::bounded(2, 5.0));
    const Layer zero{Matrix(1, 2), Vector{1.0}, Activation::relu()};
    const auto children = subdivide(root, zero, 0);
    REQUIRE(children.size() == 1);
    CHECK(children[0].region.pattern.signs_string() == "+");
    CHECK(children[0].region.pattern.redundant_string() == "1");
    CHECK(children[0].depth == 1);
}

TEST_CASE("subdividing the whole box reduces to the single-layer case")
{
    const auto l = oracle::random_layer(3, 9, 77);
    const Box box = Box::bounded(3, 6.0);
    const Layer layer{l.W, l.b, Activation::leaky_relu(0.2)};
    const auto children = subdivide(root_frame(3, box), layer, 0);
    const Partition ref = enumerate_layer(l.W, l.b, box);
    REQUIRE(children.size() == ref.regions.size());
    for (std::size_t i = 0; i < children.size(); ++i)
        CHECK(children[i].region.pattern == ref.regions[i].pattern);
}

TEST_CASE("single hidden layer network equals enumerate_layer")
{
    const std::size_t widths[] = {10};
    const Network net = random_network(3, widths, Activation::relu(), 4);
    const Box box = Box::bounded(3, 1e3);
    CHECK(signs(enumerate_network(net, box)) ==
          signs(enumerate_layer(net.layer(0).weights, net.layer(0).bias, box)));
}

TEST_CASE("layer-by-layer subdivision matches the full search")
{
    const std::size_t widths[] = {5, 4, 3};
    const Network net = random_network(2, widths, Activation::leaky_relu(0.1), 6);
    const Box box = Box::bounded(2, 8.0);
    std::vector<SubdivisionFrame> frames{root_frame(2, box)};
    for (std::size_t l = 0; l < net.depth(); ++l) {
        std::vector<SubdivisionFrame> next;
        for (const auto& f : frames)
            for (auto& c : subdivide(f, net.layer(l), static_cast<int>(l)))
                next.push_back(std::move(c));
        frames = std::move(next);
    }
    std::set<std::string> layered;
    for (const auto& f : frames)
        layered.insert(f.region.pattern.flat_key());
    CHECK(layered == flat_keys(enumerate_network(net, box)));
}

TEST_CASE("region maps reproduce forward evaluation")
{
    const std::size_t widths[] = {6, 6, 2};
    for (auto act : {Activation::relu(), Activation::leaky_relu(0.05), Activation::abs()}) {
        const Network net = random_network(3, widths, act, 13);
        const Partition p = enumerate_network(net, Box::bounded(3, 10.0));
        CHECK(p.complete);
        for (const Region& r : p.regions) {
            REQUIRE(r.affine);
            const oracle::Evaluation ev = oracle::evaluate(net, r.interior);
            CHECK(ev.key == r.pattern.flat_key());
            CHECK(oracle::relative_close(r.affine->apply(r.interior), ev.output, 1e-6));
        }
    }
}

TEST_CASE("trailing identity layer adds no subdivision")
{
    const std::size_t widths[] = {5};
    const Network hidden = random_network(2, widths, Activation::relu(), 8);
    std::vector<Layer> layers = hidden.layers();
    Matrix head(1, 5, 0.5);
    layers.push_back(Layer{head, Vector{0.25}, Activation::identity()});
    const Network net(2, layers);
    const Box box = Box::bounded(2, 10.0);
    const Partition p = enumerate_network(net, box);
    CHECK(signs(p) == signs(enumerate_network(hidden, box)));
    for (const Region& r : p.regions) {
        REQUIRE(r.affine);
        CHECK(r.affine->A.rows() == 1);
        CHECK(oracle::relative_close(r.affine->apply(r.interior), oracle::evaluate(net, r.interior).output, 1e-9));
    }
}

TEST_CASE("deep prefixes refine the first layer")
{
    const std::size_t widths[] = {6, 6};
    const Network net = random_network(2, widths, Activation::relu(), 31);
    const Box box = Box::bounded(2, 10.0);
    std::set<std::string> prefixes;
    for (const Region& r : enumerate_network(net, box).regions)
        prefixes.insert(r.pattern.per_layer[0].signs_string());
    std::set<std::string> first;
    for (const Region& r : enumerate_layer(net.layer(0).weights, net.layer(0).bias, box).regions)
        first.insert(r.pattern.signs_string());
    CHECK(prefixes == first);
}

TEST_CASE("grid sampling never finds a pattern the enumeration missed")
{
    const std::size_t widths[] = {3, 3};
    const double h = 4.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CAPTURE(seed);
        const Network net = random_network(2, widths, Activation::relu(), seed);
        const std::set<std::string> exact = flat_keys(enumerate_network(net, Box::bounded(2, h)));
        const std::set<std::string> grid = oracle::grid_keys(net, h, 1000);
        for (const auto& k : grid)
            CHECK(exact.count(k) == 1);
        if (grid.size() != exact.size()) {
            const std::set<std::string> fine = oracle::grid_keys(net, h, 2000);
            CHECK(fine.size() > grid.size());
        }
    }
}

TEST_CASE("parallel deep enumeration is identical")
{
    const std::size_t widths[] = {8, 8};
    const Network net = random_network(3, widths, Activation::leaky_relu(0.01), 2);
    EnumerateOptions par;
    par.workers = 8;
    const Partition a = enumerate_network(net, Box::bounded(3, 10.0));
    const Partition b = enumerate_network(net, Box::bounded(3, 10.0), par);
    REQUIRE(a.regions.size() == b.regions.size());
    for (std::size_t i = 0; i < a.regions.size(); ++i) {
        CHECK(a.regions[i].pattern == b.regions[i].pattern);
        CHECK(a.regions[i].interior == b.regions[i].interior);
        CHECK(a.regions[i].affine->A == b.regions[i].affine->A);
    }
}

TEST_CASE("input checks")
{
    const std::size_t widths[] = {3};
    const Network net = random_network(2, widths, Activation::relu(), 1);
    CHECK_THROWS_AS(enumerate_network(net, Box::bounded(3, 1.0)), InputError);
    const SubdivisionFrame root = root_frame(2, Box::bounded(2, 1.0));
    const Layer wide{Matrix(1, 3, 1.0), Vector{0.0}, Activation::relu()};
    CHECK_THROWS_AS(subdivide(root, wide, 0), InputError);
}
