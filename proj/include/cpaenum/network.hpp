#pragma once

#include "cpaenum/matrix.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpaenum {

enum class ActivationKind { relu, leaky_relu, abs, identity };

std::string_view to_string(ActivationKind kind);
ActivationKind activation_kind_from_string(std::string_view name);

inline constexpr double kDefaultLeakyAlpha = 0.01;

// Two-slope piecewise-linear activation: sigma(t) = slope(+1) * t for t >= 0,
// slope(-1) * t otherwise. identity carries no sign semantics.
struct Activation {
    ActivationKind kind = ActivationKind::relu;
    double alpha = kDefaultLeakyAlpha;

    static Activation relu() { return {ActivationKind::relu, kDefaultLeakyAlpha}; }
    static Activation leaky_relu(double alpha = kDefaultLeakyAlpha) { return {ActivationKind::leaky_relu, alpha}; }
    static Activation abs() { return {ActivationKind::abs, kDefaultLeakyAlpha}; }
    static Activation identity() { return {ActivationKind::identity, kDefaultLeakyAlpha}; }

    bool sign_based() const { return kind != ActivationKind::identity; }
    double slope(int sign) const;
    double apply(double t) const;

    bool operator==(const Activation& other) const;
};

struct Layer {
    Matrix weights; // K x D, row k is unit k
    Vector bias;    // K
    Activation activation;

    std::size_t input_width() const { return weights.cols(); }
    std::size_t output_width() const { return weights.rows(); }

    bool operator==(const Layer&) const = default;
};

// Immutable after construction; the constructor validates every invariant.
class Network {
public:
    Network(std::size_t input_dim, std::vector<Layer> layers);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return layers_.back().output_width(); }
    const std::vector<Layer>& layers() const { return layers_; }
    const Layer& layer(std::size_t i) const { return layers_[i]; }
    std::size_t depth() const { return layers_.size(); }

    // Layers whose activation carries sign semantics; these define the partition.
    std::size_t sign_layer_count() const;

    bool operator==(const Network&) const = default;

private:
    std::size_t input_dim_;
    std::vector<Layer> layers_;
};

struct SignPattern {
    std::vector<std::int8_t> signs;     // -1 or +1
    std::vector<std::uint8_t> redundant; // 1 where the unit's hyperplane misses the region

    std::size_t size() const { return signs.size(); }
    std::string signs_string() const;
    std::string redundant_string() const;

    bool operator==(const SignPattern&) const = default;
};

struct DeepSignPattern {
    std::vector<SignPattern> per_layer;

    // '+'/'-' per unit, layers separated by '|'.
    std::string signs_string() const;
    std::string redundant_string() const;
    // Flattened signs without separators; the canonical sort key.
    std::string flat_key() const;

    static DeepSignPattern parse(std::string_view signs, std::string_view redundant = {});

    bool operator==(const DeepSignPattern&) const = default;
};

// Lexicographic over flattened signs with '+' ordered before '-'.
bool canonical_less(const DeepSignPattern& a, const DeepSignPattern& b);

struct ForwardResult {
    Vector output;
    std::vector<Vector> preactivations; // one per layer
};

ForwardResult forward(const Network& net, std::span<const double> x);

// sign(0) is +1; redundancy flags are all false.
DeepSignPattern activation_pattern(const Network& net, std::span<const double> x);

struct AffineMap {
    Matrix A;
    Vector c;

    Vector apply(std::span<const double> x) const;
};

// Composed affine map of the whole network on the region carrying `pattern`.
AffineMap region_affine_map(const Network& net, const DeepSignPattern& pattern);

// Multiplies each row of `map` by the slope selected by the sign of that unit.
void apply_slopes(AffineMap& map, const Activation& act, std::span<const std::int8_t> signs);

// Pushes `map` through one layer's affine part: (W A, W c + b).
AffineMap compose_affine(const Layer& layer, const AffineMap& map);

Network random_network(std::size_t input_dim, std::span<const std::size_t> widths, Activation activation,
                       std::uint64_t seed);

Network load_network(std::string_view document);
std::string save_network(const Network& net);

Network load_network_file(const std::string& path);
void save_network_file(const Network& net, const std::string& path);

} // namespace cpaenum
