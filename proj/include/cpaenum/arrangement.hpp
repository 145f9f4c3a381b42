#pragma once

#include "cpaenum/lp.hpp"
#include "cpaenum/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cpaenum {

// Which unit generated a constraint row; layer == -1 marks a box row.
struct RowOrigin {
    int layer = -1;
    int unit = -1;

    bool is_box() const { return layer < 0; }
    bool operator==(const RowOrigin&) const = default;
};

struct Region {
    DeepSignPattern pattern;
    HalfspaceSystem constraints;    // non-redundant unit rows plus box rows, in input space
    std::vector<RowOrigin> origins; // parallel to constraints
    Vector interior;
    double margin = 0.0;
    std::optional<AffineMap> affine;
};

struct EnumerationStats {
    std::uint64_t region_count = 0;
    std::uint64_t lp_calls = 0;
    std::uint64_t tree_nodes = 0;
    double wall_time = 0.0; // seconds
    int worker_count = 1;
};

struct Partition {
    std::vector<Region> regions; // canonical order, see canonical_less
    EnumerationStats stats;
    bool complete = true;                 // false when some branch hit an LP numerical failure
    std::vector<std::string> diagnostics; // one entry per aborted branch
};

struct EnumerateOptions {
    LPOptions lp;
    // 1 selects the serial reference search; >1 runs the OpenMP task search.
    int workers = 1;
    // false keeps only the statistics (region_count still exact).
    bool keep_regions = true;
    // Strict-interior points each search node retains to certify cuts without an LP.
    std::size_t witness_cap = 24;
};

// Every sign pattern q whose region {x : q_k (W_k x + b_k) >= 0} intersected with the box has margin above
// the interior tolerance. Units are visited in order 1..K; +1 branches precede -1 branches.
Partition enumerate_layer(const Matrix& W, std::span<const double> b, const Box& box,
                          const EnumerateOptions& opts = {});

inline constexpr std::size_t kBruteForceMaxUnits = 20;

// Test oracle: tries all 2^K patterns with interior_point. K <= kBruteForceMaxUnits.
Partition brute_force_enumerate(const Matrix& W, std::span<const double> b, const Box& box,
                                const LPOptions& opts = {});

// sum_{i<=D} C(K, i) for affine general position, 2 sum_{i<D} C(K-1, i) for central.
std::uint64_t general_position_count(std::uint64_t K, std::uint64_t D, bool central);

} // namespace cpaenum
