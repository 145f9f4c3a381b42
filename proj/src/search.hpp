#pragma once

// Internal search engine shared by single-layer and multilayer enumeration.

#include "cpaenum/arrangement.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cpaenum::detail {

struct WitnessPoint {
    Vector x;
    double slack; // min slack against the owning node's constraints, capped at the margin cap
};

// The sign layers a search applies, in order.
struct Plan {
    std::vector<const Layer*> layers;
    std::vector<int> layer_tags;           // network layer index of each entry
    const Layer* output_layer = nullptr;   // trailing identity layer, folded into affine maps only
    bool track_affine = false;
};

// One starting region for the plan's first layer.
struct Seed {
    HalfspaceSystem constraints;
    std::vector<RowOrigin> origins;
    std::vector<WitnessPoint> witnesses; // may be empty; an interior LP is then run
    std::vector<SignPattern> prefix;
    AffineMap composed; // input -> post-activation output of the layers already applied
};

struct Leaf {
    DeepSignPattern pattern;
    HalfspaceSystem constraints;
    std::vector<RowOrigin> origins;
    Vector interior;
    double margin = 0.0;
    std::vector<WitnessPoint> witnesses;
    std::optional<AffineMap> composed; // post-activation map through the plan (output layer included)
};

struct SearchResult {
    std::vector<Leaf> leaves; // unsorted
    std::uint64_t leaf_count = 0;
    std::uint64_t lp_calls = 0;
    std::uint64_t tree_nodes = 0;
    std::vector<std::string> diagnostics;
};

SearchResult run_search(const Plan& plan, std::vector<Seed> seeds, const EnumerateOptions& opts);

// Sorts leaves canonically and converts them into a Partition.
Partition to_partition(SearchResult&& result, bool keep_affine);

} // namespace cpaenum::detail
