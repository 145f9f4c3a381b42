#include "cpaenum/network.hpp"

#include "cpaenum/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace cpaenum {

using json = nlohmann::json;

std::string_view to_string(ActivationKind kind)
{
    switch (kind) {
    case ActivationKind::relu: return "relu";
    case ActivationKind::leaky_relu: return "leaky_relu";
    case ActivationKind::abs: return "abs";
    case ActivationKind::identity: return "identity";
    }
    return "?";
}

ActivationKind activation_kind_from_string(std::string_view name)
{
    if (name == "relu") return ActivationKind::relu;
    if (name == "leaky_relu") return ActivationKind::leaky_relu;
    if (name == "abs") return ActivationKind::abs;
    if (name == "identity") return ActivationKind::identity;
    throw InputError("unknown activation kind '" + std::string(name) + "'");
}

double Activation::slope(int sign) const
{
    switch (kind) {
    case ActivationKind::relu: return sign >= 0 ? 1.0 : 0.0;
    case ActivationKind::leaky_relu: return sign >= 0 ? 1.0 : alpha;
    case ActivationKind::abs: return sign >= 0 ? 1.0 : -1.0;
    case ActivationKind::identity: return 1.0;
    }
    return 1.0;
}

double Activation::apply(double t) const
{
    return slope(t >= 0.0 ? 1 : -1) * t;
}

bool Activation::operator==(const Activation& other) const
{
    if (kind != other.kind)
        return false;
    return kind != ActivationKind::leaky_relu || alpha == other.alpha;
}

Network::Network(std::size_t input_dim, std::vector<Layer> layers) : input_dim_(input_dim), layers_(std::move(layers))
{
    if (input_dim_ == 0)
        throw InputError("network input_dim must be positive");
    if (layers_.empty())
        throw InputError("network must have at least one layer");

    std::size_t width = input_dim_;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        const std::string where = "layer " + std::to_string(l) + ": ";
        if (layer.output_width() == 0)
            throw InputError(where + "layer has no units");
        if (layer.input_width() != width)
            throw InputError(where + "dimension mismatch, expected input width " + std::to_string(width) + ", got " +
                             std::to_string(layer.input_width()));
        if (layer.bias.size() != layer.output_width())
            throw InputError(where + "bias length " + std::to_string(layer.bias.size()) + " does not match " +
                             std::to_string(layer.output_width()) + " weight rows");
        for (std::size_t k = 0; k < layer.output_width(); ++k) {
            bool all_zero = true;
            for (double v : layer.weights.row(k)) {
                if (!std::isfinite(v))
                    throw InputError(where + "non-finite weight in row " + std::to_string(k));
                all_zero = all_zero && v == 0.0;
            }
            if (all_zero)
                throw InputError(where + "zero weight row " + std::to_string(k) + " (degenerate hyperplane)");
            if (!std::isfinite(layer.bias[k]))
                throw InputError(where + "non-finite bias " + std::to_string(k));
        }
        if (layer.activation.kind == ActivationKind::leaky_relu &&
            !(layer.activation.alpha > 0.0 && layer.activation.alpha < 1.0))
            throw InputError(where + "leaky_relu alpha must lie in (0, 1)");
        if (!layer.activation.sign_based() && l + 1 != layers_.size())
            throw InputError(where + "identity activation is only allowed on the final layer");
        width = layer.output_width();
    }
}

std::size_t Network::sign_layer_count() const
{
    std::size_t n = 0;
    for (const Layer& layer : layers_)
        n += layer.activation.sign_based() ? 1 : 0;
    return n;
}

std::string SignPattern::signs_string() const
{
    std::string s;
    s.reserve(signs.size());
    for (auto q : signs)
        s.push_back(q >= 0 ? '+' : '-');
    return s;
}

std::string SignPattern::redundant_string() const
{
    std::string s;
    s.reserve(redundant.size());
    for (auto r : redundant)
        s.push_back(r ? '1' : '0');
    return s;
}

std::string DeepSignPattern::signs_string() const
{
    std::string s;
    for (std::size_t l = 0; l < per_layer.size(); ++l) {
        if (l)
            s.push_back('|');
        s += per_layer[l].signs_string();
    }
    return s;
}

std::string DeepSignPattern::redundant_string() const
{
    std::string s;
    for (std::size_t l = 0; l < per_layer.size(); ++l) {
        if (l)
            s.push_back('|');
        s += per_layer[l].redundant_string();
    }
    return s;
}

std::string DeepSignPattern::flat_key() const
{
    std::string s;
    for (const auto& layer : per_layer)
        s += layer.signs_string();
    return s;
}

DeepSignPattern DeepSignPattern::parse(std::string_view signs, std::string_view redundant)
{
    DeepSignPattern out;
    out.per_layer.emplace_back();
    for (char ch : signs) {
        if (ch == '|') {
            out.per_layer.emplace_back();
            continue;
        }
        if (ch != '+' && ch != '-')
            throw InputError("bad sign character in pattern '" + std::string(signs) + "'");
        out.per_layer.back().signs.push_back(ch == '+' ? 1 : -1);
    }
    std::size_t layer = 0;
    for (char ch : redundant) {
        if (ch == '|') {
            ++layer;
            continue;
        }
        if (layer >= out.per_layer.size() || (ch != '0' && ch != '1'))
            throw InputError("bad redundancy mask '" + std::string(redundant) + "'");
        out.per_layer[layer].redundant.push_back(ch == '1' ? 1 : 0);
    }
    for (auto& sp : out.per_layer) {
        if (redundant.empty())
            sp.redundant.assign(sp.signs.size(), 0);
        else if (sp.redundant.size() != sp.signs.size())
            throw InputError("redundancy mask shape differs from sign pattern");
    }
    return out;
}

bool canonical_less(const DeepSignPattern& a, const DeepSignPattern& b)
{
    // '+' < '-' in ASCII, so +1 sorts first.
    return a.flat_key() < b.flat_key();
}

ForwardResult forward(const Network& net, std::span<const double> x)
{
    if (x.size() != net.input_dim())
        throw InputError("forward: input has length " + std::to_string(x.size()) + ", network expects " +
                         std::to_string(net.input_dim()));
    ForwardResult out;
    Vector current(x.begin(), x.end());
    for (const Layer& layer : net.layers()) {
        Vector h = multiply(layer.weights, current);
        for (std::size_t k = 0; k < h.size(); ++k)
            h[k] += layer.bias[k];
        current.resize(h.size());
        for (std::size_t k = 0; k < h.size(); ++k)
            current[k] = layer.activation.apply(h[k]);
        out.preactivations.push_back(std::move(h));
    }
    out.output = std::move(current);
    return out;
}

DeepSignPattern activation_pattern(const Network& net, std::span<const double> x)
{
    const ForwardResult fr = forward(net, x);
    DeepSignPattern pattern;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        if (!net.layer(l).activation.sign_based())
            continue;
        SignPattern sp;
        sp.signs.reserve(fr.preactivations[l].size());
        for (double h : fr.preactivations[l])
            sp.signs.push_back(h >= 0.0 ? 1 : -1);
        sp.redundant.assign(sp.signs.size(), 0);
        pattern.per_layer.push_back(std::move(sp));
    }
    return pattern;
}

Vector AffineMap::apply(std::span<const double> x) const
{
    Vector y = multiply(A, x);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += c[i];
    return y;
}

void apply_slopes(AffineMap& map, const Activation& act, std::span<const std::int8_t> signs)
{
    for (std::size_t k = 0; k < map.A.rows(); ++k) {
        const double s = act.slope(signs[k]);
        if (s == 1.0)
            continue;
        for (double& v : map.A.row(k))
            v *= s;
        map.c[k] *= s;
    }
}

AffineMap compose_affine(const Layer& layer, const AffineMap& map)
{
    AffineMap out;
    out.A = multiply(layer.weights, map.A);
    out.c = multiply(layer.weights, map.c);
    for (std::size_t k = 0; k < out.c.size(); ++k)
        out.c[k] += layer.bias[k];
    return out;
}

AffineMap region_affine_map(const Network& net, const DeepSignPattern& pattern)
{
    if (pattern.per_layer.size() != net.sign_layer_count())
        throw InputError("region_affine_map: pattern has " + std::to_string(pattern.per_layer.size()) +
                         " layers, network has " + std::to_string(net.sign_layer_count()) + " sign layers");
    AffineMap map{Matrix::identity(net.input_dim()), Vector(net.input_dim(), 0.0)};
    std::size_t sign_layer = 0;
    for (const Layer& layer : net.layers()) {
        map = compose_affine(layer, map);
        if (!layer.activation.sign_based())
            continue;
        const SignPattern& sp = pattern.per_layer[sign_layer++];
        if (sp.signs.size() != layer.output_width())
            throw InputError("region_affine_map: pattern width mismatch at sign layer " +
                             std::to_string(sign_layer - 1));
        apply_slopes(map, layer.activation, sp.signs);
    }
    return map;
}

namespace {

// Box-Muller over mt19937_64; both halves of each pair are used.
class PortableNormal {
public:
    explicit PortableNormal(std::uint64_t seed) : engine_(seed) {}

    double operator()()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    // (0, 1]
    double uniform_open() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace

Network random_network(std::size_t input_dim, std::span<const std::size_t> widths, Activation activation,
                       std::uint64_t seed)
{
    if (input_dim == 0)
        throw InputError("random_network: input_dim must be >= 1");
    if (widths.empty())
        throw InputError("random_network: at least one width required");
    PortableNormal normal(seed);
    std::vector<Layer> layers;
    std::size_t in = input_dim;
    for (std::size_t width : widths) {
        if (width == 0)
            throw InputError("random_network: widths must be >= 1");
        Layer layer;
        layer.weights = Matrix(width, in);
        for (double& w : layer.weights.data())
            w = normal();
        layer.bias.resize(width);
        for (double& b : layer.bias)
            b = normal();
        layer.activation = activation;
        layers.push_back(std::move(layer));
        in = width;
    }
    return Network(input_dim, std::move(layers));
}

namespace {

Layer parse_layer(const json& jl, std::size_t index)
{
    const std::string where = "layer " + std::to_string(index) + ": ";
    if (!jl.is_object())
        throw InputError(where + "expected an object");
    if (!jl.contains("weights") || !jl["weights"].is_array())
        throw InputError(where + "missing 'weights' array");
    if (!jl.contains("bias") || !jl["bias"].is_array())
        throw InputError(where + "missing 'bias' array");
    if (!jl.contains("activation") || !jl["activation"].is_object())
        throw InputError(where + "missing 'activation' object");

    Layer layer;
    for (const json& row : jl["weights"]) {
        if (!row.is_array() || row.empty())
            throw InputError(where + "weight rows must be non-empty arrays");
        Vector values;
        for (const json& v : row) {
            if (!v.is_number())
                throw InputError(where + "weights must be numbers");
            values.push_back(v.get<double>());
        }
        if (!layer.weights.empty() && values.size() != layer.weights.cols())
            throw InputError(where + "ragged weight matrix");
        layer.weights.append_row(values);
    }
    for (const json& v : jl["bias"]) {
        if (!v.is_number())
            throw InputError(where + "bias entries must be numbers");
        layer.bias.push_back(v.get<double>());
    }
    const json& ja = jl["activation"];
    if (!ja.contains("kind") || !ja["kind"].is_string())
        throw InputError(where + "activation.kind must be a string");
    try {
        layer.activation.kind = activation_kind_from_string(ja["kind"].get<std::string>());
    } catch (const InputError& e) {
        throw InputError(where + e.what());
    }
    if (ja.contains("alpha") && !ja["alpha"].is_null()) {
        if (!ja["alpha"].is_number())
            throw InputError(where + "activation.alpha must be a number");
        layer.activation.alpha = ja["alpha"].get<double>();
    }
    return layer;
}

} // namespace

Network load_network(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("network JSON parse error: ") + e.what());
    }
    if (!doc.is_object())
        throw InputError("network document must be a JSON object");
    if (!doc.contains("input_dim") || !doc["input_dim"].is_number_integer() || doc["input_dim"].get<long long>() < 1)
        throw InputError("'input_dim' must be a positive integer");
    if (!doc.contains("layers") || !doc["layers"].is_array())
        throw InputError("'layers' must be an array");
    std::vector<Layer> layers;
    std::size_t index = 0;
    for (const json& jl : doc["layers"])
        layers.push_back(parse_layer(jl, index++));
    return Network(doc["input_dim"].get<std::size_t>(), std::move(layers));
}

std::string save_network(const Network& net)
{
    json doc;
    doc["input_dim"] = net.input_dim();
    json layers = json::array();
    for (const Layer& layer : net.layers()) {
        json jl;
        json rows = json::array();
        for (std::size_t k = 0; k < layer.weights.rows(); ++k) {
            auto r = layer.weights.row(k);
            rows.push_back(json(std::vector<double>(r.begin(), r.end())));
        }
        jl["weights"] = std::move(rows);
        jl["bias"] = layer.bias;
        json ja;
        ja["kind"] = std::string(to_string(layer.activation.kind));
        if (layer.activation.kind == ActivationKind::leaky_relu)
            ja["alpha"] = layer.activation.alpha;
        jl["activation"] = std::move(ja);
        layers.push_back(std::move(jl));
    }
    doc["layers"] = std::move(layers);
    // nlohmann emits the shortest decimal that round-trips each double exactly.
    return doc.dump(1) + "\n";
}

Network load_network_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open network file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_network(ss.str());
}

void save_network_file(const Network& net, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write network file '" + path + "'");
    out << save_network(net);
}

} // namespace cpaenum
