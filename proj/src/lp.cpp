#include "cpaenum/lp.hpp"

#include "cpaenum/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cpaenum {

HalfspaceSystem::HalfspaceSystem(const Matrix& normals, std::span<const double> offsets)
    : normals_(0, normals.cols()), dim_(normals.cols())
{
    if (normals.rows() != offsets.size())
        throw InputError("HalfspaceSystem: row count differs from offset count");
    for (std::size_t j = 0; j < normals.rows(); ++j)
        add(normals.row(j), offsets[j]);
}

double normalize_row(std::span<double> w, double& c)
{
    const double n = norm2(w);
    if (n == 0.0 || !std::isfinite(n))
        return n;
    for (double& v : w)
        v /= n;
    c /= n;
    return n;
}

bool HalfspaceSystem::try_add(std::span<const double> normal, double offset)
{
    if (normal.size() != dim_)
        throw InputError("HalfspaceSystem: row has dimension " + std::to_string(normal.size()) + ", expected " +
                         std::to_string(dim_));
    Vector w(normal.begin(), normal.end());
    if (normalize_row(w, offset) == 0.0)
        return false;
    add_normalized(w, offset);
    return true;
}

void HalfspaceSystem::add(std::span<const double> normal, double offset)
{
    if (!try_add(normal, offset))
        throw InputError("HalfspaceSystem: zero normal row");
}

void HalfspaceSystem::add_normalized(std::span<const double> normal, double offset)
{
    normals_.append_row(normal);
    offsets_.push_back(offset);
}

double HalfspaceSystem::slack(std::size_t j, std::span<const double> x) const
{
    return dot(normals_.row(j), x) + offsets_[j];
}

double HalfspaceSystem::min_slack(std::span<const double> x) const
{
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < size(); ++j)
        m = std::min(m, slack(j, x));
    return m;
}

Box Box::bounded(std::size_t dim, double half_width)
{
    if (!(half_width > 0.0))
        throw InputError("box half_width must be positive");
    return {dim, half_width};
}

void Box::append_rows(HalfspaceSystem& H) const
{
    if (!half_width)
        return;
    Vector e(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        e[i] = 1.0;
        H.add_normalized(e, *half_width);
        e[i] = -1.0;
        H.add_normalized(e, *half_width);
        e[i] = 0.0;
    }
}

bool Box::contains(std::span<const double> x) const
{
    if (!half_width)
        return true;
    return std::all_of(x.begin(), x.end(), [&](double v) { return std::abs(v) <= *half_width; });
}

namespace {

constexpr double kPivotEps = 1e-9;

// Dense tableau simplex for  max c.z  s.t.  A z <= b, z >= 0.
// An auxiliary column drives phase one when some b_i < 0. Entering columns follow Dantzig's rule
// and fall back to Bland's rule after a run of degenerate pivots.
class DenseSimplex {
public:
    DenseSimplex(std::size_t m, std::size_t n)
        : m_(m), n_(n), width_(n + 2), T_((m + 2) * (n + 2), 0.0), basis_(m), nonbasis_(n + 1)
    {
        for (std::size_t i = 0; i < m_; ++i) {
            basis_[i] = static_cast<int>(n_ + i);
            at(i, n_) = -1.0;
        }
        for (std::size_t j = 0; j < n_; ++j)
            nonbasis_[j] = static_cast<int>(j);
        nonbasis_[n_] = -1;
        at(m_ + 1, n_) = 1.0;
    }

    double& at(std::size_t i, std::size_t j) { return T_[i * width_ + j]; }
    double at(std::size_t i, std::size_t j) const { return T_[i * width_ + j]; }

    void set_constraint(std::size_t i, std::size_t j, double v) { at(i, j) = v; }
    void set_rhs(std::size_t i, double v) { at(i, n_ + 1) = v; }
    void set_objective(std::size_t j, double v) { at(m_, j) = -v; }

    enum class Outcome { optimal, infeasible, unbounded };

    Outcome solve(int max_pivots, Vector& z, double& value)
    {
        pivots_left_ = max_pivots;
        if (m_ > 0) {
            std::size_t r = 0;
            for (std::size_t i = 1; i < m_; ++i)
                if (at(i, n_ + 1) < at(r, n_ + 1))
                    r = i;
            if (at(r, n_ + 1) < -kPivotEps) {
                pivot(r, n_);
                if (!run(2) || at(m_ + 1, n_ + 1) < -kPivotEps)
                    return Outcome::infeasible;
                for (std::size_t i = 0; i < m_; ++i) {
                    if (basis_[i] != -1)
                        continue;
                    std::size_t s = 0;
                    for (std::size_t j = 1; j <= n_; ++j)
                        if (better_entering(at(i, j), nonbasis_[j], at(i, s), nonbasis_[s]))
                            s = j;
                    pivot(i, s);
                }
            }
        }
        const bool bounded = run(1);
        z.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= 0 && basis_[i] < static_cast<int>(n_))
                z[basis_[i]] = at(i, n_ + 1);
        value = at(m_, n_ + 1);
        return bounded ? Outcome::optimal : Outcome::unbounded;
    }

private:
    static bool better_entering(double v, int var, double best, int best_var)
    {
        return v < best || (v == best && var < best_var);
    }

    void pivot(std::size_t r, std::size_t s)
    {
        if (--pivots_left_ < 0)
            throw NumericalError("simplex pivot limit exceeded");
        double* a = &at(r, 0);
        const double inv = 1.0 / a[s];
        for (std::size_t i = 0; i < m_ + 2; ++i) {
            if (i == r)
                continue;
            double* b = &at(i, 0);
            if (std::abs(b[s]) <= kPivotEps * 1e-3) {
                b[s] = 0.0;
                continue;
            }
            const double f = b[s] * inv;
            for (std::size_t j = 0; j < width_; ++j)
                b[j] -= a[j] * f;
            b[s] = -f;
        }
        for (std::size_t j = 0; j < width_; ++j)
            if (j != s)
                a[j] *= inv;
        a[s] = inv;
        std::swap(basis_[r], nonbasis_[s]);
    }

    // phase 1 optimizes the real objective (row m), phase 2 the auxiliary one (row m + 1).
    bool run(int phase)
    {
        const std::size_t obj = m_ + static_cast<std::size_t>(phase) - 1;
        int degenerate_run = 0;
        for (;;) {
            const bool bland = degenerate_run > 50;
            std::size_t s = width_;
            for (std::size_t j = 0; j <= n_; ++j) {
                if (nonbasis_[j] == -phase)
                    continue;
                const double v = at(obj, j);
                if (v >= -kPivotEps)
                    continue;
                if (s == width_)
                    s = j;
                else if (bland ? nonbasis_[j] < nonbasis_[s] : better_entering(v, nonbasis_[j], at(obj, s), nonbasis_[s]))
                    s = j;
            }
            if (s == width_)
                return true;

            std::size_t r = m_;
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double d = at(i, s);
                if (d <= kPivotEps)
                    continue;
                const double ratio = at(i, n_ + 1) / d;
                if (r == m_ || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[r])) {
                    r = i;
                    best_ratio = ratio;
                }
            }
            if (r == m_)
                return false;
            degenerate_run = best_ratio <= kPivotEps ? degenerate_run + 1 : 0;
            pivot(r, s);
        }
    }

    std::size_t m_, n_, width_;
    std::vector<double> T_;
    std::vector<int> basis_, nonbasis_;
    int pivots_left_ = 0;
};

struct Equality {
    std::span<const double> w;
    double c;
};

// max eps s.t. rows of H and box >= eps, optional w.x + c = 0, eps <= cap.
// The displacement d = x - center is split into d+ - d-, and eps = cap - s with s >= 0.
LPResult solve_margin(const HalfspaceSystem& H, const Box& box, const Equality* eq, const LPOptions& opts,
                      std::span<const double> center)
{
    const std::size_t D = H.dim();
    if (box.dim != D)
        throw InputError("box dimension " + std::to_string(box.dim) + " differs from system dimension " +
                         std::to_string(D));
    Vector p(D, 0.0);
    if (!center.empty()) {
        if (center.size() != D)
            throw InputError("LP center hint has wrong dimension");
        std::copy(center.begin(), center.end(), p.begin());
    }

    const std::size_t box_rows = box.is_bounded() ? 2 * D : 0;
    const std::size_t ineq_rows = H.size() + box_rows;
    const double cap = opts.margin_cap;

    if (ineq_rows == 0 && eq == nullptr) {
        LPResult res;
        res.margin = cap;
        res.witness = p;
        res.status = cap > opts.interior_tol ? LPStatus::feasible : LPStatus::infeasible;
        return res;
    }

    const std::size_t m = ineq_rows + (eq ? 2 : 0);
    const std::size_t n = 2 * D + 1;
    DenseSimplex lp(m, n);

    auto put_row = [&](std::size_t i, std::span<const double> a, double slack_at_p) {
        for (std::size_t k = 0; k < D; ++k) {
            lp.set_constraint(i, k, -a[k]);
            lp.set_constraint(i, D + k, a[k]);
        }
        lp.set_constraint(i, 2 * D, -1.0);
        lp.set_rhs(i, slack_at_p - cap);
    };

    std::size_t i = 0;
    for (std::size_t j = 0; j < H.size(); ++j, ++i)
        put_row(i, H.normal(j), H.slack(j, p));
    if (box.is_bounded()) {
        Vector e(D, 0.0);
        for (std::size_t k = 0; k < D; ++k) {
            e[k] = 1.0;
            put_row(i++, e, p[k] + *box.half_width);
            e[k] = -1.0;
            put_row(i++, e, -p[k] + *box.half_width);
            e[k] = 0.0;
        }
    }
    if (eq) {
        const double at_p = dot(eq->w, p) + eq->c;
        for (std::size_t k = 0; k < D; ++k) {
            lp.set_constraint(i, k, eq->w[k]);
            lp.set_constraint(i, D + k, -eq->w[k]);
            lp.set_constraint(i + 1, k, -eq->w[k]);
            lp.set_constraint(i + 1, D + k, eq->w[k]);
        }
        lp.set_rhs(i, -at_p);
        lp.set_rhs(i + 1, at_p);
    }
    lp.set_objective(2 * D, -1.0);

    Vector z;
    double value = 0.0;
    const auto outcome = lp.solve(opts.max_pivots, z, value);
    LPResult res;
    if (outcome == DenseSimplex::Outcome::infeasible) {
        res.status = LPStatus::infeasible;
        res.margin = -std::numeric_limits<double>::infinity();
        return res;
    }
    if (outcome == DenseSimplex::Outcome::unbounded)
        throw NumericalError("margin LP reported unbounded despite the epsilon cap");

    Vector x = p;
    for (std::size_t k = 0; k < D; ++k)
        x[k] += z[k] - z[D + k];
    double eps = cap + value; // value = -s*
    if (!std::isfinite(eps))
        throw NumericalError("margin LP produced a non-finite optimum");

    double actual = H.min_slack(x);
    if (box.is_bounded())
        for (double v : x)
            actual = std::min(actual, *box.half_width - std::abs(v));
    eps = std::min({eps, actual, cap});
    res.margin = eps;
    res.witness = std::move(x);
    res.status = eps > opts.interior_tol ? LPStatus::feasible : LPStatus::infeasible;
    return res;
}

} // namespace

LPResult interior_point(const HalfspaceSystem& H, const Box& box, const LPOptions& opts, std::span<const double> hint)
{
    return solve_margin(H, box, nullptr, opts, hint);
}

CutResult hyperplane_cuts_region(const HalfspaceSystem& H, std::span<const double> w, double c, const Box& box,
                                 const LPOptions& opts, std::span<const double> interior)
{
    if (w.size() != H.dim())
        throw InputError("hyperplane dimension differs from region dimension");
    Vector wn(w.begin(), w.end());
    double cn = c;
    if (normalize_row(wn, cn) == 0.0)
        throw InputError("hyperplane_cuts_region: zero normal");

    Vector p;
    if (interior.empty()) {
        LPResult ip = interior_point(H, box, opts);
        if (!ip.feasible())
            throw InputError("hyperplane_cuts_region: region has no strict interior");
        p = *ip.witness;
    } else {
        p.assign(interior.begin(), interior.end());
    }

    const Equality eq{wn, cn};
    CutResult out;
    out.lp = solve_margin(H, box, &eq, opts, p);
    if (out.lp.feasible()) {
        out.status = CutStatus::cuts;
    } else {
        out.status = dot(wn, p) + cn >= 0.0 ? CutStatus::no_cut_positive_side : CutStatus::no_cut_negative_side;
    }
    return out;
}

} // namespace cpaenum
