#pragma once

// Test-side reference computations. They avoid the library's LP and search code so that they can
// check it independently.

#include "cpaenum/network.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using cpaenum::Matrix;
using cpaenum::Network;
using cpaenum::Vector;

// Generic region count of K hyperplanes in R^D: sum_{i<=D} C(K, i), or 2 sum_{i<D} C(K-1, i) if central.
std::uint64_t region_count(std::uint64_t K, std::uint64_t D, bool central);

struct Evaluation {
    Vector output;
    std::string key; // '+'/'-' per sign-layer unit, sign(0) = '+'
};

// Plain loop evaluation of the network.
Evaluation evaluate(const Network& net, const Vector& x);

// Keys found on a uniform n x n grid over [-h, h]^2 (D must be 2).
std::set<std::string> grid_keys(const Network& net, double h, int n);

struct RandomLayer {
    Matrix W;
    Vector b;
};

// Standard-normal rows; b = 0 when central.
RandomLayer random_layer(std::size_t D, std::size_t K, std::uint64_t seed, bool central = false);

// Single relu layer wrapped as a network.
Network layer_network(const RandomLayer& layer);

// max over an n x n grid on [-h, h]^2 of min_j (a_j . x + b_j) / |a_j|.
double grid_max_min_slack(const Matrix& A, const Vector& b, double h, int n);

bool relative_close(const Vector& got, const Vector& want, double rel);

} // namespace oracle
