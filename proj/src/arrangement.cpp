#include "cpaenum/arrangement.hpp"

#include "cpaenum/error.hpp"
#include "search.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace cpaenum {

namespace {

void check_layer_input(const Matrix& W, std::span<const double> b, const Box& box, const char* who)
{
    if (W.rows() != b.size())
        throw InputError(std::string(who) + ": weight rows and bias length differ");
    if (W.cols() == 0)
        throw InputError(std::string(who) + ": input dimension must be positive");
    if (box.dim != W.cols())
        throw InputError(std::string(who) + ": box dimension differs from input dimension");
    for (std::size_t k = 0; k < W.rows(); ++k)
        if (norm2(W.row(k)) == 0.0)
            throw InputError(std::string(who) + ": zero weight row " + std::to_string(k));
}

std::pair<HalfspaceSystem, std::vector<RowOrigin>> box_system(const Box& box)
{
    HalfspaceSystem H(box.dim);
    box.append_rows(H);
    return {std::move(H), std::vector<RowOrigin>(H.size())};
}

} // namespace

Partition enumerate_layer(const Matrix& W, std::span<const double> b, const Box& box, const EnumerateOptions& opts)
{
    check_layer_input(W, b, box, "enumerate_layer");
    const auto start = std::chrono::steady_clock::now();

    Layer layer{W, Vector(b.begin(), b.end()), Activation::relu()};
    detail::Plan plan;
    plan.layers = {&layer};
    plan.layer_tags = {0};

    detail::Seed seed;
    std::tie(seed.constraints, seed.origins) = box_system(box);
    seed.composed = {Matrix::identity(W.cols()), Vector(W.cols(), 0.0)};
    std::vector<detail::Seed> seeds;
    seeds.push_back(std::move(seed));

    Partition part = detail::to_partition(detail::run_search(plan, std::move(seeds), opts), false);
    part.stats.worker_count = std::max(1, opts.workers);
    part.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return part;
}

Partition brute_force_enumerate(const Matrix& W, std::span<const double> b, const Box& box, const LPOptions& opts)
{
    check_layer_input(W, b, box, "brute_force_enumerate");
    const std::size_t K = W.rows();
    if (K > kBruteForceMaxUnits)
        throw InputError("brute_force_enumerate: K = " + std::to_string(K) + " exceeds the guard of " +
                         std::to_string(kBruteForceMaxUnits));
    if (box.is_bounded() && !(*box.half_width > 0.0))
        throw InputError("brute_force_enumerate: degenerate box");
    const auto start = std::chrono::steady_clock::now();

    Partition part;
    const auto [box_rows, box_origins] = box_system(box);

    auto region_of = [&](std::span<const std::int8_t> signs) {
        HalfspaceSystem H = box_rows;
        Vector row(W.cols());
        for (std::size_t k = 0; k < signs.size(); ++k) {
            for (std::size_t i = 0; i < row.size(); ++i)
                row[i] = signs[k] * W(k, i);
            H.add(row, signs[k] * b[k]);
        }
        return H;
    };

    // Feasibility of sign prefixes, memoized; a unit is redundant when the opposite sign is infeasible
    // against the units before it.
    std::map<std::vector<std::int8_t>, bool> prefix_feasible;
    auto feasible_prefix = [&](const std::vector<std::int8_t>& prefix) {
        auto it = prefix_feasible.find(prefix);
        if (it != prefix_feasible.end())
            return it->second;
        ++part.stats.lp_calls;
        const bool ok = interior_point(region_of(prefix), Box::unbounded(W.cols()), opts).feasible();
        prefix_feasible.emplace(prefix, ok);
        return ok;
    };

    std::vector<std::int8_t> signs(K);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << K); ++mask) {
        for (std::size_t k = 0; k < K; ++k)
            signs[k] = (mask >> k) & 1 ? -1 : 1;
        ++part.stats.tree_nodes;
        ++part.stats.lp_calls;
        HalfspaceSystem H = region_of(signs);
        LPResult ip = interior_point(H, Box::unbounded(W.cols()), opts);
        if (!ip.feasible())
            continue;

        Region r;
        SignPattern sp;
        sp.signs = signs;
        sp.redundant.assign(K, 0);
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<std::int8_t> flipped(signs.begin(), signs.begin() + static_cast<std::ptrdiff_t>(k) + 1);
            flipped[k] = static_cast<std::int8_t>(-flipped[k]);
            sp.redundant[k] = feasible_prefix(flipped) ? 0 : 1;
        }
        // Same row layout as the tree search: box rows, then non-redundant units in order.
        r.constraints = box_rows;
        r.origins = box_origins;
        Vector row(W.cols());
        for (std::size_t k = 0; k < K; ++k) {
            if (sp.redundant[k])
                continue;
            for (std::size_t i = 0; i < row.size(); ++i)
                row[i] = signs[k] * W(k, i);
            r.constraints.add(row, signs[k] * b[k]);
            r.origins.push_back({0, static_cast<int>(k)});
        }
        r.pattern.per_layer.push_back(std::move(sp));
        r.interior = *ip.witness;
        r.margin = ip.margin;
        part.regions.push_back(std::move(r));
    }
    std::sort(part.regions.begin(), part.regions.end(),
              [](const Region& a, const Region& b) { return canonical_less(a.pattern, b.pattern); });
    part.stats.region_count = part.regions.size();
    part.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return part;
}

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i)
        r = r * (n - k + i) / i; // exact: r * (n-k+i) is divisible by i at every step
    return r;
}

} // namespace

std::uint64_t general_position_count(std::uint64_t K, std::uint64_t D, bool central)
{
    if (D == 0)
        throw InputError("general_position_count: D must be >= 1");
    std::uint64_t total = 0;
    if (!central) {
        for (std::uint64_t i = 0; i <= D; ++i)
            total += binomial(K, i);
        return total;
    }
    if (K == 0)
        return 1;
    for (std::uint64_t i = 0; i < D; ++i)
        total += binomial(K - 1, i);
    return 2 * total;
}

} // namespace cpaenum
