#pragma once

#include "cpaenum/matrix.hpp"

#include <optional>
#include <span>

namespace cpaenum {

inline constexpr double kDefaultInteriorTol = 1e-7;
inline constexpr double kDefaultMarginCap = 1.0;
inline constexpr double kDefaultBoxHalfWidth = 1e3;

struct LPOptions {
    double interior_tol = kDefaultInteriorTol; // tau: strict-interior threshold on the margin
    double margin_cap = kDefaultMarginCap;     // epsilon cap keeping the LP bounded
    int max_pivots = 5000;                     // cycling / stalling guard
};

// Rows a_j . x + b_j >= 0, each normal rescaled to unit Euclidean norm on insertion.
class HalfspaceSystem {
public:
    HalfspaceSystem() = default;
    explicit HalfspaceSystem(std::size_t dim) : normals_(0, dim), dim_(dim) {}
    HalfspaceSystem(const Matrix& normals, std::span<const double> offsets);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return offsets_.size(); }
    bool empty() const { return offsets_.empty(); }

    // Returns false (and adds nothing) for a zero normal.
    bool try_add(std::span<const double> normal, double offset);
    // Throws InputError for a zero normal.
    void add(std::span<const double> normal, double offset);
    // Appends an already unit-normalized row verbatim.
    void add_normalized(std::span<const double> normal, double offset);

    std::span<const double> normal(std::size_t j) const { return normals_.row(j); }
    double offset(std::size_t j) const { return offsets_[j]; }
    const Matrix& normals() const { return normals_; }
    const Vector& offsets() const { return offsets_; }

    double slack(std::size_t j, std::span<const double> x) const;
    // min_j slack; +inf when the system is empty.
    double min_slack(std::span<const double> x) const;

    bool operator==(const HalfspaceSystem&) const = default;

private:
    Matrix normals_;
    Vector offsets_;
    std::size_t dim_ = 0;
};

// Normalizes (w, c) to unit norm in place; returns the original norm (0 leaves it untouched).
double normalize_row(std::span<double> w, double& c);

// Axis-aligned cube [-h, h]^D, or the whole space.
struct Box {
    std::size_t dim = 0;
    std::optional<double> half_width;

    static Box bounded(std::size_t dim, double half_width);
    static Box unbounded(std::size_t dim) { return {dim, std::nullopt}; }

    bool is_bounded() const { return half_width.has_value(); }
    // The 2D rows e_i . x + h >= 0 and -e_i . x + h >= 0.
    void append_rows(HalfspaceSystem& H) const;
    bool contains(std::span<const double> x) const;
};

enum class LPStatus { feasible, infeasible };

struct LPResult {
    LPStatus status = LPStatus::infeasible;
    std::optional<Vector> witness;
    double margin = 0.0; // maximized slack epsilon (-inf when the LP itself is infeasible)

    bool feasible() const { return status == LPStatus::feasible; }
};

// max eps  s.t.  a_j . x + b_j >= eps,  box rows,  eps <= cap.
// Feasible iff eps* > interior_tol. `hint` (a point, need not be feasible) only recenters the tableau.
LPResult interior_point(const HalfspaceSystem& H, const Box& box, const LPOptions& opts = {},
                        std::span<const double> hint = {});

enum class CutStatus { cuts, no_cut_positive_side, no_cut_negative_side };

struct CutResult {
    CutStatus status = CutStatus::cuts;
    LPResult lp; // the on-hyperplane margin LP
};

// Does {w . x + c = 0} pass through the strict interior of H (intersected with box)?
// (w, c) is normalized internally. `interior` is a known strict interior point of the region; when
// empty one is computed. Throws InputError if H has no strict interior.
CutResult hyperplane_cuts_region(const HalfspaceSystem& H, std::span<const double> w, double c, const Box& box,
                                 const LPOptions& opts = {}, std::span<const double> interior = {});

} // namespace cpaenum
