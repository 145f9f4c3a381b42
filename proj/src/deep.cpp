#include "cpaenum/deep.hpp"

#include "cpaenum/error.hpp"
#include "search.hpp"

#include <algorithm>
#include <chrono>

namespace cpaenum {

SubdivisionFrame root_frame(std::size_t input_dim, const Box& box, const LPOptions& opts)
{
    if (box.dim != input_dim)
        throw InputError("root_frame: box dimension differs from input dimension");
    SubdivisionFrame frame;
    frame.region.constraints = HalfspaceSystem(input_dim);
    box.append_rows(frame.region.constraints);
    frame.region.origins.assign(frame.region.constraints.size(), RowOrigin{});
    LPResult ip = interior_point(frame.region.constraints, Box::unbounded(input_dim), opts);
    if (!ip.feasible())
        throw InputError("root_frame: box has no strict interior");
    frame.region.interior = *ip.witness;
    frame.region.margin = ip.margin;
    frame.composed = {Matrix::identity(input_dim), Vector(input_dim, 0.0)};
    frame.region.affine = frame.composed;
    return frame;
}

namespace {

detail::Seed seed_from(const SubdivisionFrame& frame, const LPOptions& opts)
{
    detail::Seed seed;
    seed.constraints = frame.region.constraints;
    seed.origins = frame.region.origins;
    seed.prefix = frame.region.pattern.per_layer;
    seed.composed = frame.composed;
    auto add = [&](const Vector& x) {
        const double slack = std::min(frame.region.constraints.min_slack(x), opts.margin_cap);
        if (slack > opts.interior_tol)
            seed.witnesses.push_back({x, slack});
    };
    if (!frame.region.interior.empty())
        add(frame.region.interior);
    for (const Vector& x : frame.witnesses)
        add(x);
    return seed;
}

} // namespace

std::vector<SubdivisionFrame> subdivide(const SubdivisionFrame& frame, const Layer& layer, int layer_index,
                                        const LPOptions& opts, EnumerationStats* stats)
{
    if (layer.input_width() != frame.composed.A.rows())
        throw InputError("subdivide: layer input width " + std::to_string(layer.input_width()) +
                         " differs from composed output width " + std::to_string(frame.composed.A.rows()));
    if (!layer.activation.sign_based())
        throw InputError("subdivide: identity layers induce no subdivision");

    detail::Plan plan;
    plan.layers = {&layer};
    plan.layer_tags = {layer_index};
    plan.track_affine = true;

    EnumerateOptions eo;
    eo.lp = opts;
    std::vector<detail::Seed> seeds;
    seeds.push_back(seed_from(frame, opts));
    detail::SearchResult result = detail::run_search(plan, std::move(seeds), eo);
    if (!result.diagnostics.empty()) {
        std::string msg = "subdivide: LP failure inside parent region " + frame.region.pattern.signs_string();
        for (const auto& d : result.diagnostics)
            msg += "; " + d;
        throw NumericalError(msg);
    }
    if (stats) {
        stats->lp_calls += result.lp_calls;
        stats->tree_nodes += result.tree_nodes;
        stats->region_count += result.leaf_count;
    }

    std::sort(result.leaves.begin(), result.leaves.end(), [](const detail::Leaf& a, const detail::Leaf& b) {
        return canonical_less(a.pattern, b.pattern);
    });
    std::vector<SubdivisionFrame> children;
    children.reserve(result.leaves.size());
    for (detail::Leaf& leaf : result.leaves) {
        SubdivisionFrame child;
        child.depth = frame.depth + 1;
        child.region.pattern = std::move(leaf.pattern);
        child.region.constraints = std::move(leaf.constraints);
        child.region.origins = std::move(leaf.origins);
        child.region.interior = std::move(leaf.interior);
        child.region.margin = leaf.margin;
        child.composed = std::move(*leaf.composed);
        child.region.affine = child.composed;
        for (auto& w : leaf.witnesses)
            child.witnesses.push_back(std::move(w.x));
        children.push_back(std::move(child));
    }
    return children;
}

Partition enumerate_network(const Network& net, const Box& box, const EnumerateOptions& opts)
{
    if (box.dim != net.input_dim())
        throw InputError("enumerate_network: box dimension differs from network input dimension");
    const auto start = std::chrono::steady_clock::now();

    detail::Plan plan;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const Layer& layer = net.layer(l);
        if (layer.activation.sign_based()) {
            plan.layers.push_back(&layer);
            plan.layer_tags.push_back(static_cast<int>(l));
        } else {
            plan.output_layer = &layer; // only ever the final layer
        }
    }
    if (plan.layers.empty())
        throw InputError("enumerate_network: network has no sign-based layer");
    plan.track_affine = true;

    detail::Seed seed;
    seed.constraints = HalfspaceSystem(net.input_dim());
    box.append_rows(seed.constraints);
    seed.origins.assign(seed.constraints.size(), RowOrigin{});
    seed.composed = {Matrix::identity(net.input_dim()), Vector(net.input_dim(), 0.0)};
    std::vector<detail::Seed> seeds;
    seeds.push_back(std::move(seed));

    Partition part = detail::to_partition(detail::run_search(plan, std::move(seeds), opts), true);
    part.stats.worker_count = std::max(1, opts.workers);
    part.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return part;
}

} // namespace cpaenum
