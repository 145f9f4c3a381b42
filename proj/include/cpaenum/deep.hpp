#pragma once

#include "cpaenum/arrangement.hpp"

namespace cpaenum {

// A region of the partition built by the first `depth` sign layers, together with the affine map
// from input space to the post-activation output of those layers.
struct SubdivisionFrame {
    std::size_t depth = 0;
    Region region;
    AffineMap composed;
    // Extra strict-interior points of region (besides region.interior); reused by the next search.
    std::vector<Vector> witnesses;
};

// Frame covering the whole box before any layer is applied (depth 0, identity map).
SubdivisionFrame root_frame(std::size_t input_dim, const Box& box, const LPOptions& opts = {});

// Splits frame.region by `layer`, whose pre-activation over input space is W A x + W c + b.
// `layer_index` tags the new constraint rows; each child extends the pattern by one SignPattern.
// Runs serially; `stats` (if given) accumulates LP calls and tree nodes.
std::vector<SubdivisionFrame> subdivide(const SubdivisionFrame& frame, const Layer& layer, int layer_index,
                                        const LPOptions& opts = {}, EnumerationStats* stats = nullptr);

// Full input-space partition of the network; every region carries its composed affine map.
Partition enumerate_network(const Network& net, const Box& box, const EnumerateOptions& opts = {});

} // namespace cpaenum
