#pragma once

// Kelley cutting planes for constraints on the largest eigenvalue of an
// affine symmetric matrix function F(z) = F0 + sum_k z_k F_k over a box
// 0 <= z <= upper. Every eigenvector v with v^T F(z) v > 0 yields the valid
// linear cut sum_k z_k v^T F_k v <= -v^T F0 v (or <= t in epigraph form).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "lp.hpp"

namespace posctl {

struct AffineSymmetric {
    Matrix F0;
    std::vector<Matrix> F;

    [[nodiscard]] std::size_t dim() const noexcept { return F0.rows(); }
    [[nodiscard]] std::size_t vars() const noexcept { return F.size(); }

    [[nodiscard]] Matrix operator()(std::span<const double> z) const {
        Matrix S = F0;
        for (std::size_t k = 0; k < F.size(); ++k)
            if (z[k] != 0.0)
                S += z[k] * F[k];
        return 0.5 * (S + S.transpose());
    }
};

struct CutOptions {
    double upper = 1e6;
    double tol = 1e-8;
    int max_cuts = 5000;
};

enum class CutStatus { feasible, infeasible, unknown };

struct CutResult {
    CutStatus status = CutStatus::unknown;
    Vector z;
    double lambda_max = std::numeric_limits<double>::infinity();
    double lower_bound = -std::numeric_limits<double>::infinity();  ///< epigraph form only
    double objective = std::numeric_limits<double>::quiet_NaN();    ///< linear form only
    int cuts = 0;
    bool at_upper = false;  ///< some z_k sits on the box bound
};

namespace detail {

struct Cut {
    Vector coeff;  // v^T F_k v
    double rhs;    // -v^T F0 v
};

inline Cut make_cut(const AffineSymmetric& F, std::span<const double> v) {
    auto quad = [&](const Matrix& S) {
        const Vector Sv = S * v;
        return dot(v, Sv);
    };
    Cut c;
    c.coeff.resize(F.vars());
    for (std::size_t k = 0; k < F.vars(); ++k)
        c.coeff[k] = quad(F.F[k]);
    c.rhs = -quad(F.F0);
    return c;
}

inline void seed_cuts(const AffineSymmetric& F, std::vector<Cut>& cuts) {
    const std::size_t n = F.dim();
    Vector e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        e.assign(n, 0.0);
        e[i] = 1.0;
        cuts.push_back(make_cut(F, e));
    }
    if (n > 1)
        cuts.push_back(make_cut(F, Vector(n, 1.0 / std::sqrt(static_cast<double>(n)))));
}

inline int add_violated_cuts(const AffineSymmetric& F, const SymmetricEigen& eig, double threshold,
                             std::vector<Cut>& cuts) {
    int added = 0;
    for (std::size_t k = eig.values.size(); k-- > 0;) {
        if (eig.values[k] <= threshold && added > 0)
            break;
        cuts.push_back(make_cut(F, eig.vectors.col(k)));
        ++added;
    }
    return added;
}

inline bool touches_upper(std::span<const double> z, double upper) {
    return std::any_of(z.begin(), z.end(), [upper](double v) { return v >= upper * (1.0 - 1e-9); });
}

}  // namespace detail

/// Minimizes lambda_max(F(z)) over the box. feasible: a point with
/// lambda_max <= tol was found; infeasible: the LP lower bound exceeds tol.
[[nodiscard]] inline CutResult minimize_lambda_max(const AffineSymmetric& F, const CutOptions& opt = {}) {
    const std::size_t K = F.vars();
    CutResult res;
    std::vector<detail::Cut> cuts;
    detail::seed_cuts(F, cuts);
    for (res.cuts = 0; res.cuts < opt.max_cuts;) {
        // Variables (z, t): minimize t with sum z_k a_k - t <= rhs per cut.
        lp::Builder b(K + 1);
        b.set_objective(K, 1.0);
        b.set_free(K);
        for (const auto& c : cuts) {
            std::vector<double> row(c.coeff);
            row.push_back(-1.0);
            b.add_dense_row(std::move(row), c.rhs);
        }
        for (std::size_t k = 0; k < K; ++k)
            b.add_row({{k, 1.0}}, opt.upper);
        const lp::Outcome out = lp::solve(b.build());
        if (!out.optimal())
            throw NumericalError("minimize_lambda_max: cutting-plane LP failed");
        res.lower_bound = out.y[K];
        res.z.assign(out.y.begin(), out.y.begin() + static_cast<std::ptrdiff_t>(K));
        const SymmetricEigen eig = symmetric_eigen(F(res.z));
        res.lambda_max = eig.values.empty() ? -std::numeric_limits<double>::infinity() : eig.values.back();
        res.at_upper = detail::touches_upper(res.z, opt.upper);
        if (res.lambda_max <= opt.tol) {
            res.status = CutStatus::feasible;
            return res;
        }
        if (res.lower_bound > opt.tol) {
            res.status = CutStatus::infeasible;
            return res;
        }
        res.cuts += detail::add_violated_cuts(F, eig, res.lower_bound, cuts);
    }
    res.status = CutStatus::unknown;
    return res;
}

/// Minimizes cost^T z subject to F(z) <= 0 (within tol) over the box.
/// infeasible means no box point satisfies the outer approximation.
[[nodiscard]] inline CutResult minimize_linear_nsd(const AffineSymmetric& F, std::span<const double> cost,
                                                   const CutOptions& opt = {}) {
    const std::size_t K = F.vars();
    if (cost.size() != K)
        throw DimensionError("minimize_linear_nsd: cost length differs from variable count");
    CutResult res;
    std::vector<detail::Cut> cuts;
    detail::seed_cuts(F, cuts);
    for (res.cuts = 0; res.cuts < opt.max_cuts;) {
        lp::Builder b(K);
        for (std::size_t k = 0; k < K; ++k)
            b.set_objective(k, cost[k]);
        for (const auto& c : cuts)
            b.add_dense_row(c.coeff, c.rhs);
        for (std::size_t k = 0; k < K; ++k)
            b.add_row({{k, 1.0}}, opt.upper);
        const lp::Outcome out = lp::solve(b.build());
        if (out.status == lp::Status::infeasible) {
            res.status = CutStatus::infeasible;
            return res;
        }
        if (!out.optimal())
            throw NumericalError("minimize_linear_nsd: cutting-plane LP failed");
        res.z = out.y;
        res.objective = out.objective;
        const SymmetricEigen eig = symmetric_eigen(F(res.z));
        res.lambda_max = eig.values.empty() ? -std::numeric_limits<double>::infinity() : eig.values.back();
        res.at_upper = detail::touches_upper(res.z, opt.upper);
        if (res.lambda_max <= opt.tol) {
            res.status = CutStatus::feasible;
            return res;
        }
        res.cuts += detail::add_violated_cuts(F, eig, opt.tol, cuts);
    }
    res.status = CutStatus::unknown;
    return res;
}

}  // namespace posctl
