#pragma once

#include "cpaenum/arrangement.hpp"
#include "cpaenum/network.hpp"

#include <string>
#include <vector>

namespace cpaenum {

// The 2-plane x = anchor + u * basis_u + v * basis_v, viewed over [-extent, extent]^2.
struct SliceSpec {
    Vector anchor;
    Vector basis_u;
    Vector basis_v;
    double extent = 5.0;
    int resolution = 800; // SVG canvas side in pixels

    // Anchor 0 and the first two coordinate axes.
    static SliceSpec axis_aligned(std::size_t dim, double extent = 5.0);
    void validate(std::size_t dim) const;
    Vector lift(double u, double v) const;
};

// Same network on 2 inputs: the first layer becomes (W [bu bv], W anchor + b).
Network restrict_to_plane(const Network& net, const SliceSpec& spec);

struct SliceSegment {
    double u0, v0, u1, v1; // plane coordinates
    int layer;             // network layer index of the generating unit
    int unit;
};

struct SliceResult {
    Partition partition; // of the restricted network, over the slice square
    std::vector<SliceSegment> segments;
};

// Exact partition of the slice plus every region edge, each emitted once from the region lying on the
// positive side of its generating unit.
SliceResult compute_slice(const Network& net, const SliceSpec& spec, const EnumerateOptions& opts = {});

// Layer colours by sign-layer ordinal: black, blue, red, then cycling.
std::string slice_to_svg(const SliceResult& slice, const Network& net, const SliceSpec& spec);

} // namespace cpaenum
