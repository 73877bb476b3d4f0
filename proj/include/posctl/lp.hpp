#pragma once

/**
 * @file lp.hpp
 * @brief Dense two-phase simplex with Bland's anti-cycling rule.
 *
 * Problems are stated as
 *
 *     minimize  c^T y   subject to  M y <= b  (rows in `equality_rows` as ==),
 *               y_j >= 0 where nonneg[j]
 *
 * Strict inequalities are realized by margin maximization: every row listed in
 * `strict_rows` receives a common slack variable eps, which is maximized
 * subject to eps <= 1. A point counts as strictly feasible when the optimal
 * eps exceeds kMarginFloor.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"

namespace posctl::lp {

inline constexpr double kMarginFloor = 1e-9;

struct LinearProgram {
    Vector c;
    Matrix M;
    Vector b;
    std::vector<bool> nonneg;                 ///< empty means "all nonnegative"
    std::vector<std::size_t> strict_rows;
    std::vector<std::size_t> equality_rows;

    [[nodiscard]] std::size_t num_vars() const noexcept { return M.cols(); }
    [[nodiscard]] std::size_t num_rows() const noexcept { return M.rows(); }
};

enum class Status { optimal, infeasible, unbounded };

struct Outcome {
    Status status = Status::infeasible;
    Vector y;
    double objective = std::numeric_limits<double>::quiet_NaN();
    /// Smallest slack over strict rows (+inf when there are none).
    double margin = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool optimal() const noexcept { return status == Status::optimal; }
};

/// Incremental row builder; keeps call sites close to the mathematical form.
class Builder {
public:
    explicit Builder(std::size_t num_vars) : n_(num_vars), c_(num_vars, 0.0) {}

    void set_objective(std::size_t var, double coeff) { c_.at(var) = coeff; }

    void set_free(std::size_t var) {
        if (free_.size() < n_)
            free_.assign(n_, false);
        free_.at(var) = true;
    }

    /// Adds sum coeffs[k] * y[vars[k]] (<=|==) rhs and returns the row index.
    std::size_t add_row(const std::vector<std::pair<std::size_t, double>>& terms, double rhs, bool strict = false,
                        bool equality = false) {
        std::vector<double> row(n_, 0.0);
        for (const auto& [var, coeff] : terms)
            row.at(var) += coeff;
        rows_.push_back(std::move(row));
        b_.push_back(rhs);
        const std::size_t idx = rows_.size() - 1;
        if (strict)
            strict_.push_back(idx);
        if (equality)
            eq_.push_back(idx);
        return idx;
    }

    std::size_t add_dense_row(std::vector<double> row, double rhs, bool strict = false) {
        if (row.size() != n_)
            throw DimensionError("LP builder: dense row has wrong length");
        rows_.push_back(std::move(row));
        b_.push_back(rhs);
        if (strict)
            strict_.push_back(rows_.size() - 1);
        return rows_.size() - 1;
    }

    [[nodiscard]] LinearProgram build() const {
        LinearProgram lp;
        lp.c = c_;
        lp.M = Matrix(rows_.size(), n_);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (std::size_t j = 0; j < n_; ++j)
                lp.M(i, j) = rows_[i][j];
        lp.b = b_;
        if (!free_.empty()) {
            lp.nonneg.assign(n_, true);
            for (std::size_t j = 0; j < n_; ++j)
                lp.nonneg[j] = !free_[j];
        }
        lp.strict_rows = strict_;
        lp.equality_rows = eq_;
        return lp;
    }

private:
    std::size_t n_;
    Vector c_;
    std::vector<bool> free_;
    std::vector<std::vector<double>> rows_;
    Vector b_;
    std::vector<std::size_t> strict_;
    std::vector<std::size_t> eq_;
};

namespace detail {

inline void validate(const LinearProgram& lp) {
    const std::size_t n = lp.M.cols(), m = lp.M.rows();
    if (lp.c.size() != n)
        throw DimensionError("LP: objective length differs from variable count");
    if (lp.b.size() != m)
        throw DimensionError("LP: rhs length differs from row count");
    if (!lp.nonneg.empty() && lp.nonneg.size() != n)
        throw DimensionError("LP: nonneg mask length differs from variable count");
    for (std::size_t r : lp.strict_rows)
        if (r >= m)
            throw DimensionError("LP: strict row index out of range");
    for (std::size_t r : lp.equality_rows)
        if (r >= m)
            throw DimensionError("LP: equality row index out of range");
    if (!all_finite(lp.M) || !std::all_of(lp.b.begin(), lp.b.end(), [](double v) { return std::isfinite(v); }) ||
        !std::all_of(lp.c.begin(), lp.c.end(), [](double v) { return std::isfinite(v); }))
        throw NumericalError("LP: non-finite data");
}

/// Dense simplex tableau: rows 0..m-1 are constraints, the last column is the rhs.
class Tableau {
public:
    static constexpr double kPivotTol = 1e-11;
    static constexpr double kCostTol = 1e-11;

    Tableau(std::size_t m, std::size_t ncols) : m_(m), n_(ncols), t_(m, ncols + 1), basis_(m), cost_(ncols + 1, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return t_(i, j); }
    double& rhs(std::size_t i) { return t_(i, n_); }
    std::size_t& basis(std::size_t i) { return basis_[i]; }
    [[nodiscard]] std::size_t basis(std::size_t i) const { return basis_[i]; }
    [[nodiscard]] double value(std::size_t i) const { return t_(i, n_); }
    [[nodiscard]] double entry(std::size_t i, std::size_t j) const { return t_(i, j); }

    /// Loads reduced costs for cost vector c (size n_) given the current basis.
    void price(const Vector& c) {
        cost_scale_ = 1.0;
        for (std::size_t j = 0; j < n_; ++j)
            cost_scale_ = std::max(cost_scale_, std::abs(c[j]));
        for (std::size_t j = 0; j < n_; ++j)
            cost_[j] = c[j];
        cost_[n_] = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (!row_active_[i])
                continue;
            const double cb = c[basis_[i]];
            if (cb == 0.0)
                continue;
            for (std::size_t j = 0; j <= n_; ++j)
                cost_[j] -= cb * t_(i, j);
        }
    }

    /// Runs Bland-rule pivots. Returns false when unbounded.
    bool optimize(const std::vector<bool>& allowed) {
        const double scale = cost_scale_;
        for (long iter = 0;; ++iter) {
            if (iter > 1'000'000)
                throw NumericalError("simplex iteration cap exceeded");
            std::size_t enter = n_;
            for (std::size_t j = 0; j < n_; ++j)
                if (allowed[j] && cost_[j] < -kCostTol * scale) {
                    enter = j;
                    break;
                }
            if (enter == n_)
                return true;
            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (!row_active_[i] || t_(i, enter) <= kPivotTol)
                    continue;
                const double ratio = std::max(0.0, t_(i, n_)) / t_(i, enter);
                const double tie = 1e-12 * std::max(1.0, std::abs(best));
                if (leave == m_ || ratio < best - tie) {
                    best = ratio;
                    leave = i;
                } else if (ratio <= best + tie && basis_[i] < basis_[leave]) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave == m_)
                return false;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const double p = t_(r, c);
        for (std::size_t j = 0; j <= n_; ++j)
            t_(r, j) /= p;
        t_(r, c) = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r)
                continue;
            const double f = t_(i, c);
            if (f == 0.0)
                continue;
            for (std::size_t j = 0; j <= n_; ++j)
                t_(i, j) -= f * t_(r, j);
            t_(i, c) = 0.0;
        }
        const double f = cost_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= n_; ++j)
                cost_[j] -= f * t_(r, j);
            cost_[c] = 0.0;
        }
        basis_[r] = c;
    }

    [[nodiscard]] double objective_value() const { return -cost_[n_]; }

    void deactivate(std::size_t r) { row_active_[r] = false; }
    [[nodiscard]] bool active(std::size_t r) const { return row_active_[r]; }
    void init_active() { row_active_.assign(m_, true); }

    [[nodiscard]] std::size_t rows() const { return m_; }
    [[nodiscard]] std::size_t cols() const { return n_; }

private:
    std::size_t m_, n_;
    Matrix t_;
    std::vector<std::size_t> basis_;
    Vector cost_;
    double cost_scale_ = 1.0;
    std::vector<bool> row_active_;
};

}  // namespace detail

/// Solves the LP ignoring strictness; strict rows only enter the reported margin.
[[nodiscard]] inline Outcome solve(const LinearProgram& lp) {
    detail::validate(lp);
    const std::size_t n = lp.M.cols(), m = lp.M.rows();
    const std::set<std::size_t> eq(lp.equality_rows.begin(), lp.equality_rows.end());

    // Column layout: structural (free variables split in two), then one slack
    // per inequality row, then artificials.
    std::vector<std::size_t> pos_col(n), neg_col(n, SIZE_MAX);
    std::size_t ncols = 0;
    for (std::size_t j = 0; j < n; ++j) {
        pos_col[j] = ncols++;
        if (!lp.nonneg.empty() && !lp.nonneg[j])
            neg_col[j] = ncols++;
    }
    std::vector<std::size_t> slack_col(m, SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i)
        if (!eq.count(i))
            slack_col[i] = ncols++;
    std::vector<bool> flip(m, false), needs_art(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        flip[i] = lp.b[i] < 0;
        needs_art[i] = eq.count(i) || flip[i];
    }
    const std::size_t first_art = ncols;
    std::vector<std::size_t> art_col(m, SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i)
        if (needs_art[i])
            art_col[i] = ncols++;

    detail::Tableau T(m, ncols);
    T.init_active();
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = flip[i] ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = lp.M(i, j);
            T.at(i, pos_col[j]) = sign * a;
            if (neg_col[j] != SIZE_MAX)
                T.at(i, neg_col[j]) = -sign * a;
        }
        if (slack_col[i] != SIZE_MAX)
            T.at(i, slack_col[i]) = sign;
        T.rhs(i) = sign * lp.b[i];
        if (needs_art[i]) {
            T.at(i, art_col[i]) = 1.0;
            T.basis(i) = art_col[i];
        } else {
            T.basis(i) = slack_col[i];
        }
    }

    std::vector<bool> allowed(ncols, true);
    if (first_art < ncols) {
        Vector phase1(ncols, 0.0);
        for (std::size_t j = first_art; j < ncols; ++j)
            phase1[j] = 1.0;
        T.price(phase1);
        T.optimize(allowed);
        double bscale = 1.0;
        for (double v : lp.b)
            bscale = std::max(bscale, std::abs(v));
        if (T.objective_value() > 1e-9 * bscale)
            return Outcome{Status::infeasible, {}, std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN()};
        // Drive remaining artificials out of the basis or retire redundant rows.
        for (std::size_t i = 0; i < m; ++i) {
            if (T.basis(i) < first_art)
                continue;
            std::size_t best = SIZE_MAX;
            double best_abs = 1e-9;
            for (std::size_t j = 0; j < first_art; ++j)
                if (std::abs(T.entry(i, j)) > best_abs) {
                    best_abs = std::abs(T.entry(i, j));
                    best = j;
                }
            if (best == SIZE_MAX)
                T.deactivate(i);
            else
                T.pivot(i, best);
        }
        for (std::size_t j = first_art; j < ncols; ++j)
            allowed[j] = false;
    }

    Vector cost(ncols, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        cost[pos_col[j]] = lp.c[j];
        if (neg_col[j] != SIZE_MAX)
            cost[neg_col[j]] = -lp.c[j];
    }
    T.price(cost);
    if (!T.optimize(allowed))
        return Outcome{Status::unbounded, {}, -std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::quiet_NaN()};

    Vector z(ncols, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (T.active(i))
            z[T.basis(i)] = std::max(0.0, T.value(i));

    Outcome out;
    out.status = Status::optimal;
    out.y.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        out.y[j] = z[pos_col[j]];
        if (neg_col[j] != SIZE_MAX)
            out.y[j] -= z[neg_col[j]];
    }
    out.objective = dot(lp.c, out.y);
    const Vector My = lp.M * out.y;
    for (std::size_t r : lp.strict_rows)
        out.margin = std::min(out.margin, lp.b[r] - My[r]);
    return out;
}

/// Maximizes a uniform slack eps (capped at 1) on the strict rows.
///
/// The returned outcome is `optimal` iff the best eps exceeds kMarginFloor;
/// otherwise it is `infeasible` and still carries the best point and eps found
/// (when the non-strict rows are feasible at all). The objective of `lp` is
/// ignored.
[[nodiscard]] inline Outcome feasibility_with_margin(const LinearProgram& lp) {
    detail::validate(lp);
    const std::size_t n = lp.M.cols(), m = lp.M.rows();
    LinearProgram aug;
    aug.M = Matrix(m + 1, n + 1);
    aug.b = lp.b;
    aug.b.push_back(1.0);
    aug.c.assign(n + 1, 0.0);
    aug.c[n] = -1.0;
    aug.nonneg.assign(n + 1, true);
    for (std::size_t j = 0; j < n; ++j)
        aug.nonneg[j] = lp.nonneg.empty() ? true : lp.nonneg[j];
    aug.nonneg[n] = false;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            aug.M(i, j) = lp.M(i, j);
    for (std::size_t r : lp.strict_rows)
        aug.M(r, n) = 1.0;
    aug.M(m, n) = 1.0;
    aug.equality_rows = lp.equality_rows;

    const Outcome inner = solve(aug);
    Outcome out;
    if (inner.status != Status::optimal) {
        out.status = Status::infeasible;
        out.margin = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.y.assign(inner.y.begin(), inner.y.begin() + static_cast<std::ptrdiff_t>(n));
    out.objective = dot(lp.c, out.y);
    // Report the slack actually achieved by the returned point.
    const Vector My = lp.M * out.y;
    out.margin = std::numeric_limits<double>::infinity();
    for (std::size_t r : lp.strict_rows)
        out.margin = std::min(out.margin, lp.b[r] - My[r]);
    if (lp.strict_rows.empty())
        out.margin = inner.y[n];
    out.status = out.margin > kMarginFloor ? Status::optimal : Status::infeasible;
    return out;
}

}  // namespace posctl::lp
