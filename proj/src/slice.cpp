#include "cpaenum/slice.hpp"

#include "cpaenum/deep.hpp"
#include "cpaenum/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace cpaenum {

SliceSpec SliceSpec::axis_aligned(std::size_t dim, double extent)
{
    if (dim < 2)
        throw InputError("slice: input dimension must be at least 2");
    SliceSpec spec;
    spec.anchor.assign(dim, 0.0);
    spec.basis_u.assign(dim, 0.0);
    spec.basis_v.assign(dim, 0.0);
    spec.basis_u[0] = 1.0;
    spec.basis_v[1] = 1.0;
    spec.extent = extent;
    return spec;
}

void SliceSpec::validate(std::size_t dim) const
{
    if (dim < 2)
        throw InputError("slice: input dimension must be at least 2");
    if (anchor.size() != dim || basis_u.size() != dim || basis_v.size() != dim)
        throw InputError("slice: anchor and basis vectors must have the network's input dimension");
    if (!(extent > 0.0))
        throw InputError("slice: extent must be positive");
    if (resolution < 16)
        throw InputError("slice: resolution must be at least 16");
    constexpr double tol = 1e-10;
    if (std::abs(dot(basis_u, basis_u) - 1.0) > tol || std::abs(dot(basis_v, basis_v) - 1.0) > tol ||
        std::abs(dot(basis_u, basis_v)) > tol)
        throw InputError("slice: basis vectors are not orthonormal");
}

Vector SliceSpec::lift(double u, double v) const
{
    Vector x = anchor;
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] += u * basis_u[i] + v * basis_v[i];
    return x;
}

Network restrict_to_plane(const Network& net, const SliceSpec& spec)
{
    spec.validate(net.input_dim());
    std::vector<Layer> layers = net.layers();
    Layer& first = layers.front();
    const Layer& orig = net.layer(0);
    first.weights = Matrix(orig.output_width(), 2);
    for (std::size_t k = 0; k < orig.output_width(); ++k) {
        first.weights(k, 0) = dot(orig.weights.row(k), spec.basis_u);
        first.weights(k, 1) = dot(orig.weights.row(k), spec.basis_v);
        first.bias[k] = dot(orig.weights.row(k), spec.anchor) + orig.bias[k];
        if (first.weights(k, 0) == 0.0 && first.weights(k, 1) == 0.0)
            throw InputError("slice: unit " + std::to_string(k) +
                             " of the first layer is constant on the plane; choose another basis");
    }
    return Network(2, std::move(layers));
}

namespace {

// Clip the line {a . p + b = 0} of row j to the region; false when the intersection is degenerate.
bool clip_row(const HalfspaceSystem& H, std::size_t j, double out[4])
{
    const auto a = H.normal(j);
    const double b = H.offset(j);
    const double p0[2] = {-b * a[0], -b * a[1]};
    const double d[2] = {-a[1], a[0]};
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (i == j)
            continue;
        const auto n = H.normal(i);
        const double alpha = n[0] * d[0] + n[1] * d[1];
        const double beta = n[0] * p0[0] + n[1] * p0[1] + H.offset(i);
        if (std::abs(alpha) < 1e-14) {
            if (beta < -1e-12)
                return false;
            continue;
        }
        const double t = -beta / alpha;
        if (alpha > 0.0)
            lo = std::max(lo, t);
        else
            hi = std::min(hi, t);
    }
    if (!(hi - lo > 1e-9) || !std::isfinite(lo) || !std::isfinite(hi))
        return false;
    out[0] = p0[0] + lo * d[0];
    out[1] = p0[1] + lo * d[1];
    out[2] = p0[0] + hi * d[0];
    out[3] = p0[1] + hi * d[1];
    return true;
}

const char* layer_colour(std::size_t ordinal)
{
    static const char* colours[] = {"#000000", "#0000ff", "#ff0000"};
    return colours[ordinal % 3];
}

} // namespace

SliceResult compute_slice(const Network& net, const SliceSpec& spec, const EnumerateOptions& opts)
{
    const Network plane = restrict_to_plane(net, spec);
    SliceResult out;
    EnumerateOptions eo = opts;
    eo.keep_regions = true;
    out.partition = enumerate_network(plane, Box::bounded(2, spec.extent), eo);

    std::map<int, std::size_t> sign_ordinal;
    for (std::size_t l = 0, s = 0; l < net.depth(); ++l)
        if (net.layer(l).activation.sign_based())
            sign_ordinal[static_cast<int>(l)] = s++;

    for (const Region& r : out.partition.regions) {
        for (std::size_t j = 0; j < r.constraints.size(); ++j) {
            const RowOrigin& o = r.origins[j];
            if (o.is_box())
                continue;
            const auto& sp = r.pattern.per_layer[sign_ordinal.at(o.layer)];
            if (sp.signs[static_cast<std::size_t>(o.unit)] < 0)
                continue;
            double seg[4];
            if (clip_row(r.constraints, j, seg))
                out.segments.push_back({seg[0], seg[1], seg[2], seg[3], o.layer, o.unit});
        }
    }
    return out;
}

std::string slice_to_svg(const SliceResult& slice, const Network& net, const SliceSpec& spec)
{
    std::map<int, std::size_t> sign_ordinal;
    for (std::size_t l = 0, s = 0; l < net.depth(); ++l)
        if (net.layer(l).activation.sign_based())
            sign_ordinal[static_cast<int>(l)] = s++;

    const double px = spec.resolution;
    const double scale = px / (2.0 * spec.extent);
    auto to_x = [&](double u) { return (u + spec.extent) * scale; };
    auto to_y = [&](double v) { return (spec.extent - v) * scale; };

    std::string svg;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  spec.resolution, spec.resolution, spec.resolution, spec.resolution);
    svg += buf;
    std::snprintf(buf, sizeof buf, "<desc>regions: %llu; extent: %.17g</desc>\n",
                  static_cast<unsigned long long>(slice.partition.stats.region_count), spec.extent);
    svg += buf;
    std::snprintf(buf, sizeof buf, "<rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"#ffffff\"/>\n",
                  spec.resolution, spec.resolution);
    svg += buf;
    for (const SliceSegment& s : slice.segments) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.4f\" y1=\"%.4f\" x2=\"%.4f\" y2=\"%.4f\" stroke=\"%s\" stroke-width=\"1\" "
                      "data-layer=\"%d\" data-unit=\"%d\" data-u0=\"%.17g\" data-v0=\"%.17g\" data-u1=\"%.17g\" "
                      "data-v1=\"%.17g\"/>\n",
                      to_x(s.u0), to_y(s.v0), to_x(s.u1), to_y(s.v1), layer_colour(sign_ordinal.at(s.layer)), s.layer,
                      s.unit, s.u0, s.v0, s.u1, s.v1);
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace cpaenum
