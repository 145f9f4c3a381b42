#include "search.hpp"

#include "cpaenum/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cpaenum::detail {

namespace {

// Hyperplanes of one sign layer over input space, restricted to one parent region.
struct Context {
    std::size_t step = 0;
    AffineMap pre;     // raw pre-activation map of this layer
    Matrix normals;    // unit rows; zero rows stay zero
    Vector offsets;
    std::vector<std::uint8_t> zero;
    std::vector<SignPattern> prefix;
};

struct Node {
    std::shared_ptr<const Context> ctx;
    HalfspaceSystem constraints;
    std::vector<RowOrigin> origins;
    std::vector<std::int8_t> signs;
    std::vector<std::uint8_t> redundant;
    std::vector<std::uint32_t> open; // units whose hyperplane may still cut the region
    std::vector<WitnessPoint> witnesses;
    int split_depth = 0;
};

constexpr int kTaskSplitDepth = 18;

struct alignas(64) WorkerState {
    std::vector<Leaf> leaves;
    std::uint64_t leaf_count = 0;
    std::uint64_t lp_calls = 0;
    std::uint64_t tree_nodes = 0;
    std::vector<std::string> diagnostics;
};

std::string describe(const Node& node)
{
    std::string s;
    for (const auto& sp : node.ctx->prefix)
        s += sp.signs_string() + "|";
    for (std::size_t k = 0; k < node.signs.size(); ++k)
        s.push_back(node.signs[k] > 0 ? '+' : node.signs[k] < 0 ? '-' : '.');
    return s;
}

class Engine {
public:
    Engine(const Plan& plan, const EnumerateOptions& opts) : plan_(plan), opts_(opts), tol_(opts.lp.interior_tol) {}

    std::shared_ptr<const Context> make_context(std::size_t step, const AffineMap& composed,
                                                std::vector<SignPattern> prefix) const
    {
        auto ctx = std::make_shared<Context>();
        ctx->step = step;
        ctx->pre = compose_affine(*plan_.layers[step], composed);
        ctx->normals = ctx->pre.A;
        ctx->offsets = ctx->pre.c;
        const std::size_t K = ctx->normals.rows();
        ctx->zero.assign(K, 0);
        for (std::size_t k = 0; k < K; ++k) {
            auto row = ctx->normals.row(k);
            const double n = norm2(row);
            // Dead compositions produce exact zeros; tiny residue from cancellation is treated alike.
            if (n <= 1e-12 * (1.0 + std::abs(ctx->offsets[k]))) {
                std::fill(row.begin(), row.end(), 0.0);
                ctx->zero[k] = 1;
                continue;
            }
            normalize_row(row, ctx->offsets[k]);
        }
        ctx->prefix = std::move(prefix);
        return ctx;
    }

    Node make_root(std::shared_ptr<const Context> ctx, HalfspaceSystem constraints, std::vector<RowOrigin> origins,
                   std::vector<WitnessPoint> witnesses) const
    {
        Node node;
        const std::size_t K = ctx->normals.rows();
        node.signs.assign(K, 0);
        node.redundant.assign(K, 0);
        for (std::size_t k = 0; k < K; ++k) {
            if (ctx->zero[k]) {
                node.signs[k] = ctx->offsets[k] >= 0.0 ? 1 : -1;
                node.redundant[k] = 1;
            } else {
                node.open.push_back(static_cast<std::uint32_t>(k));
            }
        }
        node.ctx = std::move(ctx);
        node.constraints = std::move(constraints);
        node.origins = std::move(origins);
        node.witnesses = std::move(witnesses);
        return node;
    }

    // Expands one node. Children (or the next layer's root) are appended to `out`; finished regions
    // go to `state`.
    void expand(Node& node, WorkerState& state, std::vector<Node>& out) const
    {
        ++state.tree_nodes;
        const Context& ctx = *node.ctx;
        const std::size_t D = node.constraints.dim();

        if (node.witnesses.empty()) {
            ++state.lp_calls;
            LPResult ip = interior_point(node.constraints, Box::unbounded(D), opts_.lp);
            if (!ip.feasible())
                return;
            node.witnesses.push_back({*ip.witness, std::min(ip.margin, opts_.lp.margin_cap)});
        }

        std::vector<std::uint32_t> still_open;
        still_open.reserve(node.open.size());
        for (std::uint32_t u : node.open) {
            const auto w = ctx.normals.row(u);
            const double c = ctx.offsets[u];
            bool pos = false, neg = false;
            for (const auto& p : node.witnesses) {
                const double v = dot(w, p.x) + c;
                pos = pos || v > tol_;
                neg = neg || v < -tol_;
            }
            if (pos && neg) {
                still_open.push_back(u);
                continue;
            }
            ++state.lp_calls;
            const CutResult cut = hyperplane_cuts_region(node.constraints, w, c, Box::unbounded(D), opts_.lp,
                                                         best_witness(node).x);
            if (cut.status == CutStatus::cuts) {
                still_open.push_back(u);
                add_split_witnesses(node, w, *cut.lp.witness);
            } else {
                node.signs[u] = cut.status == CutStatus::no_cut_positive_side ? 1 : -1;
                node.redundant[u] = 1;
            }
        }
        node.open = std::move(still_open);

        if (node.open.empty()) {
            finish(node, state, out);
            return;
        }

        const std::uint32_t u = node.open.front();
        const auto w = ctx.normals.row(u);
        const double c = ctx.offsets[u];
        for (int side : {1, -1}) {
            Node child;
            child.ctx = node.ctx;
            child.constraints = node.constraints;
            Vector row(w.begin(), w.end());
            for (double& v : row)
                v *= side;
            child.constraints.add_normalized(row, side * c);
            child.origins = node.origins;
            child.origins.push_back({plan_.layer_tags[ctx.step], static_cast<int>(u)});
            child.signs = node.signs;
            child.signs[u] = static_cast<std::int8_t>(side);
            child.redundant = node.redundant;
            child.open.assign(node.open.begin() + 1, node.open.end());
            child.split_depth = node.split_depth + 1;
            for (const auto& p : node.witnesses) {
                const double v = side * (dot(w, p.x) + c);
                if (v > tol_)
                    child.witnesses.push_back({p.x, std::min(p.slack, v)});
            }
            out.push_back(std::move(child));
        }
    }

    void run_serial(std::vector<Node> roots, WorkerState& state) const;
    void run_task(Node&& root, std::vector<WorkerState>& states) const;

private:
    static const WitnessPoint& best_witness(const Node& node)
    {
        return *std::max_element(node.witnesses.begin(), node.witnesses.end(),
                                 [](const WitnessPoint& a, const WitnessPoint& b) { return a.slack < b.slack; });
    }

    void push_witness(Node& node, WitnessPoint&& p) const
    {
        if (node.witnesses.size() < opts_.witness_cap) {
            node.witnesses.push_back(std::move(p));
            return;
        }
        // Keep the cloud spread out: the new point replaces its nearest neighbour.
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < node.witnesses.size(); ++i) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < p.x.size(); ++k) {
                const double d = node.witnesses[i].x[k] - p.x[k];
                d2 += d * d;
            }
            if (d2 < best) {
                best = d2;
                nearest = i;
            }
        }
        node.witnesses[nearest] = std::move(p);
    }

    // From a point on the cutting hyperplane, step along +-w to half the distance to the region boundary.
    void add_split_witnesses(Node& node, std::span<const double> w, const Vector& on_plane) const
    {
        const HalfspaceSystem& H = node.constraints;
        for (int side : {1, -1}) {
            double t = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < H.size(); ++j) {
                const double rate = side * dot(H.normal(j), w);
                if (rate < 0.0)
                    t = std::min(t, H.slack(j, on_plane) / -rate);
            }
            if (!std::isfinite(t))
                t = 2.0 * opts_.lp.margin_cap;
            t *= 0.5;
            if (!(t > tol_))
                continue;
            Vector x = on_plane;
            for (std::size_t k = 0; k < x.size(); ++k)
                x[k] += side * t * w[k];
            const double slack = std::min(H.min_slack(x), opts_.lp.margin_cap);
            if (slack > tol_)
                push_witness(node, {std::move(x), slack});
        }
    }

    void finish(Node& node, WorkerState& state, std::vector<Node>& out) const
    {
        const Context& ctx = *node.ctx;
        const Layer& layer = *plan_.layers[ctx.step];
        SignPattern sp{std::move(node.signs), std::move(node.redundant)};

        AffineMap post;
        const bool need_map = plan_.track_affine || ctx.step + 1 < plan_.layers.size();
        if (need_map) {
            post = ctx.pre;
            apply_slopes(post, layer.activation, sp.signs);
        }

        if (ctx.step + 1 < plan_.layers.size()) {
            std::vector<SignPattern> prefix = ctx.prefix;
            prefix.push_back(std::move(sp));
            auto next = make_context(ctx.step + 1, post, std::move(prefix));
            out.push_back(make_root(std::move(next), std::move(node.constraints), std::move(node.origins),
                                    std::move(node.witnesses)));
            return;
        }

        ++state.leaf_count;
        if (!opts_.keep_regions)
            return;
        Leaf leaf;
        leaf.pattern.per_layer = ctx.prefix;
        leaf.pattern.per_layer.push_back(std::move(sp));
        const WitnessPoint& best = best_witness(node);
        leaf.interior = best.x;
        leaf.margin = best.slack;
        leaf.constraints = std::move(node.constraints);
        leaf.origins = std::move(node.origins);
        leaf.witnesses = std::move(node.witnesses);
        if (plan_.track_affine)
            leaf.composed = plan_.output_layer ? compose_affine(*plan_.output_layer, post) : std::move(post);
        state.leaves.push_back(std::move(leaf));
    }

    void expand_guarded(Node& node, WorkerState& state, std::vector<Node>& out) const
    {
        try {
            expand(node, state, out);
        } catch (const NumericalError& e) {
            state.diagnostics.push_back("branch " + describe(node) + ": " + e.what());
        }
    }

    void run_serial_impl(std::vector<Node> roots, WorkerState& state) const
    {
        std::vector<Node> stack;
        for (auto it = roots.rbegin(); it != roots.rend(); ++it)
            stack.push_back(std::move(*it));
        std::vector<Node> out;
        while (!stack.empty()) {
            Node node = std::move(stack.back());
            stack.pop_back();
            out.clear();
            expand_guarded(node, state, out);
            for (auto it = out.rbegin(); it != out.rend(); ++it)
                stack.push_back(std::move(*it));
        }
    }

    void run_task_impl(Node&& root, std::vector<WorkerState>& states) const
    {
        std::vector<Node> stack;
        stack.push_back(std::move(root));
        std::vector<Node> out;
        while (!stack.empty()) {
            Node node = std::move(stack.back());
            stack.pop_back();
            out.clear();
            expand_guarded(node, states[static_cast<std::size_t>(omp_get_thread_num())], out);
            for (auto it = out.rbegin(); it != out.rend(); ++it) {
                if (it->split_depth <= kTaskSplitDepth && it + 1 != out.rend()) {
                    Node* spawned = new Node(std::move(*it));
#pragma omp task default(none) firstprivate(spawned) shared(states)
                    {
                        std::unique_ptr<Node> owned(spawned);
                        run_task_impl(std::move(*owned), states);
                    }
                } else {
                    stack.push_back(std::move(*it));
                }
            }
        }
    }

    const Plan& plan_;
    const EnumerateOptions& opts_;
    double tol_;
};

void Engine::run_serial(std::vector<Node> roots, WorkerState& state) const
{
    run_serial_impl(std::move(roots), state);
}

void Engine::run_task(Node&& root, std::vector<WorkerState>& states) const
{
    run_task_impl(std::move(root), states);
}

} // namespace

SearchResult run_search(const Plan& plan, std::vector<Seed> seeds, const EnumerateOptions& opts)
{
    if (plan.layers.empty())
        throw InputError("search plan has no layers");
    const Engine engine(plan, opts);

    std::vector<Node> roots;
    roots.reserve(seeds.size());
    for (Seed& seed : seeds) {
        auto ctx = engine.make_context(0, seed.composed, std::move(seed.prefix));
        roots.push_back(engine.make_root(std::move(ctx), std::move(seed.constraints), std::move(seed.origins),
                                         std::move(seed.witnesses)));
    }

    const int workers = std::max(1, opts.workers);
    std::vector<WorkerState> states(static_cast<std::size_t>(workers));
    if (workers == 1) {
        engine.run_serial(std::move(roots), states[0]);
    } else {
#pragma omp parallel num_threads(workers) default(none) shared(engine, roots, states)
#pragma omp single
        {
            for (Node& root : roots) {
                Node* spawned = new Node(std::move(root));
#pragma omp task default(none) firstprivate(spawned) shared(engine, states)
                {
                    std::unique_ptr<Node> owned(spawned);
                    engine.run_task(std::move(*owned), states);
                }
            }
        }
    }

    SearchResult result;
    for (WorkerState& s : states) {
        result.leaf_count += s.leaf_count;
        result.lp_calls += s.lp_calls;
        result.tree_nodes += s.tree_nodes;
        std::move(s.leaves.begin(), s.leaves.end(), std::back_inserter(result.leaves));
        std::move(s.diagnostics.begin(), s.diagnostics.end(), std::back_inserter(result.diagnostics));
    }
    std::sort(result.diagnostics.begin(), result.diagnostics.end());
    return result;
}

Partition to_partition(SearchResult&& result, bool keep_affine)
{
    std::vector<std::pair<std::string, std::size_t>> order;
    order.reserve(result.leaves.size());
    for (std::size_t i = 0; i < result.leaves.size(); ++i)
        order.emplace_back(result.leaves[i].pattern.flat_key(), i);
    std::sort(order.begin(), order.end());

    Partition part;
    part.regions.reserve(order.size());
    for (const auto& [key, i] : order) {
        Leaf& leaf = result.leaves[i];
        Region r;
        r.pattern = std::move(leaf.pattern);
        r.constraints = std::move(leaf.constraints);
        r.origins = std::move(leaf.origins);
        r.interior = std::move(leaf.interior);
        r.margin = leaf.margin;
        if (keep_affine)
            r.affine = std::move(leaf.composed);
        part.regions.push_back(std::move(r));
    }
    part.stats.region_count = result.leaf_count;
    part.stats.lp_calls = result.lp_calls;
    part.stats.tree_nodes = result.tree_nodes;
    part.diagnostics = std::move(result.diagnostics);
    part.complete = part.diagnostics.empty();
    return part;
}

} // namespace cpaenum::detail
