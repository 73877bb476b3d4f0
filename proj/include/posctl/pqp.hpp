#pragma once

/**
 * @file pqp.hpp
 * @brief Positive quadratic programs and edge-local NSD decompositions.
 *
 * A positive quadratic program maximizes x^T M0 x over x >= 0 subject to
 * x^T Mk x >= bk with every Mk symmetric Metzler. Writing y_i = x_i^2 turns
 * each form into sum_i m_ii y_i + sum_{i != j} m_ij sqrt(y_i y_j), which is
 * concave on y >= 0 because the off-diagonal weights are nonnegative. The
 * primal is solved in y by a log-barrier Newton method; the dual
 * (minimize -sum tau_k b_k subject to M0 + sum tau_k Mk <= 0) by eigenvector
 * cutting planes.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eigen_cuts.hpp"
#include "error.hpp"
#include "linalg.hpp"

namespace posctl {

struct PqpInstance {
    Matrix M0;
    std::vector<Matrix> M;
    Vector b;

    [[nodiscard]] std::size_t size() const noexcept { return M0.rows(); }
    [[nodiscard]] std::size_t constraints() const noexcept { return M.size(); }

    void validate(double tol = kDefaultTol) const {
        const std::size_t n = M0.rows();
        if (!M0.is_square())
            throw DimensionError("pqp: M0 must be square");
        if (M.size() != b.size())
            throw DimensionError("pqp: one bound per constraint matrix is required");
        auto check = [&](const Matrix& X, const std::string& name) {
            if (X.rows() != n || X.cols() != n)
                throw DimensionError("pqp: " + name + " has the wrong size");
            if (!is_symmetric(X, tol))
                throw StructureError("pqp: " + name + " is not symmetric");
            if (!is_metzler(X, tol))
                throw StructureError("pqp: " + name + " is not Metzler");
        };
        check(M0, "M0");
        for (std::size_t k = 0; k < M.size(); ++k)
            check(M[k], "M" + std::to_string(k + 1));
    }
};

[[nodiscard]] inline double quadratic_form(const Matrix& S, std::span<const double> x) {
    const Vector Sx = S * x;
    return dot(x, Sx);
}

struct PqpPrimalResult {
    Vector x;
    double value = 0.0;
    int newton_steps = 0;
};

struct PqpDualResult {
    Vector tau;
    double value = 0.0;
    double lambda_max = 0.0;  ///< of M0 + sum tau_k Mk at the returned tau
    int cuts = 0;
};

namespace detail {

// The form x^T S x as a function of y = x.^2.
struct SqrtForm {
    const Matrix* S;

    [[nodiscard]] double value(std::span<const double> y) const {
        const std::size_t n = y.size();
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v += (*S)(i, i) * y[i];
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && (*S)(i, j) != 0.0)
                    v += (*S)(i, j) * std::sqrt(y[i] * y[j]);
        }
        return v;
    }
    void gradient(std::span<const double> y, Vector& g) const {
        const std::size_t n = y.size();
        g.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = (*S)(i, i);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && (*S)(i, j) != 0.0)
                    g[i] += (*S)(i, j) * std::sqrt(y[j] / y[i]);
        }
    }
    void add_hessian(std::span<const double> y, double w, Matrix& H) const {
        const std::size_t n = y.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || (*S)(i, j) == 0.0)
                    continue;
                const double m = (*S)(i, j);
                H(i, i) -= w * 0.5 * m * std::sqrt(y[j]) / (y[i] * std::sqrt(y[i]));
                H(i, j) += w * 0.5 * m / std::sqrt(y[i] * y[j]);
            }
    }
};

// Barrier objective: t f0(y) + sum_k log(g_k(y) - s) + sum_i log y_i + log(R - sum y).
// With phase1 set, f0 is the slack s itself (last variable) and constraints
// read g_k(y) - s > 0; otherwise s is absent.
class Barrier {
public:
    Barrier(const PqpInstance& inst, bool phase1, double radius)
        : inst_(inst), phase1_(phase1), radius_(radius), n_(inst.size()) {}

    [[nodiscard]] std::size_t vars() const noexcept { return n_ + (phase1_ ? 1 : 0); }

    [[nodiscard]] bool inside(std::span<const double> z) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!(z[i] > 0.0))
                return false;
            sum += z[i];
        }
        if (!(sum < radius_))
            return false;
        const double s = phase1_ ? z[n_] : 0.0;
        for (std::size_t k = 0; k < inst_.constraints(); ++k)
            if (!(constraint(k, z) - s > 0.0))
                return false;
        return true;
    }

    [[nodiscard]] double objective(std::span<const double> z) const {
        return phase1_ ? z[n_] : SqrtForm{&inst_.M0}.value(z.first(n_));
    }

    [[nodiscard]] double constraint(std::size_t k, std::span<const double> z) const {
        return SqrtForm{&inst_.M[k]}.value(z.first(n_)) - inst_.b[k];
    }

    [[nodiscard]] double value(std::span<const double> z, double t) const {
        double v = t * objective(z);
        const double s = phase1_ ? z[n_] : 0.0;
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            v += std::log(z[i]);
            sum += z[i];
        }
        v += std::log(radius_ - sum);
        for (std::size_t k = 0; k < inst_.constraints(); ++k)
            v += std::log(constraint(k, z) - s);
        return v;
    }

    void derivatives(std::span<const double> z, double t, Vector& grad, Matrix& H) const {
        const std::size_t N = vars();
        grad.assign(N, 0.0);
        H = Matrix(N, N);
        const std::span<const double> y = z.first(n_);
        Vector g;
        if (phase1_) {
            grad[n_] += t;
        } else {
            SqrtForm{&inst_.M0}.gradient(y, g);
            for (std::size_t i = 0; i < n_; ++i)
                grad[i] += t * g[i];
            SqrtForm{&inst_.M0}.add_hessian(y, t, H);
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            grad[i] += 1.0 / y[i];
            H(i, i) -= 1.0 / (y[i] * y[i]);
            sum += y[i];
        }
        const double r = radius_ - sum;
        for (std::size_t i = 0; i < n_; ++i) {
            grad[i] -= 1.0 / r;
            for (std::size_t j = 0; j < n_; ++j)
                H(i, j) -= 1.0 / (r * r);
        }
        const double s = phase1_ ? z[n_] : 0.0;
        for (std::size_t k = 0; k < inst_.constraints(); ++k) {
            const SqrtForm f{&inst_.M[k]};
            const double c = f.value(y) - inst_.b[k] - s;
            f.gradient(y, g);
            if (phase1_)
                g.push_back(-1.0);
            for (std::size_t i = 0; i < N; ++i) {
                grad[i] += g[i] / c;
                for (std::size_t j = 0; j < N; ++j)
                    H(i, j) -= g[i] * g[j] / (c * c);
            }
            f.add_hessian(y, 1.0 / c, H);
        }
    }

private:
    const PqpInstance& inst_;
    bool phase1_;
    double radius_;
    std::size_t n_;
};

// Damped Newton ascent on the barrier at fixed t; returns steps taken.
inline int center(const Barrier& B, Vector& z, double t) {
    Vector grad;
    Matrix H;
    int steps = 0;
    for (; steps < 200; ++steps) {
        B.derivatives(z, t, grad, H);
        // Barrier curvatures span many decades (1/y^2 with y near the radius),
        // so solve the symmetrically equilibrated system D(-H)D w = D grad.
        const std::size_t N = z.size();
        Vector d(N);
        for (std::size_t i = 0; i < N; ++i)
            d[i] = -H(i, i) > 0.0 ? 1.0 / std::sqrt(-H(i, i)) : 1.0;
        Matrix S(N, N);
        Vector rhs(N);
        for (std::size_t i = 0; i < N; ++i) {
            rhs[i] = d[i] * grad[i];
            for (std::size_t j = 0; j < N; ++j)
                S(i, j) = -d[i] * H(i, j) * d[j];
        }
        LuDecomposition<double> lu(S);
        if (lu.singular())
            break;
        Vector dz = lu.solve(rhs);  // ascent direction (-H)^{-1} grad
        for (std::size_t i = 0; i < N; ++i)
            dz[i] *= d[i];
        const double decrement = dot(grad, dz);
        if (!(decrement > 1e-12))
            break;
        const double base = B.value(z, t);
        double step = 1.0;
        Vector trial(z.size());
        bool moved = false;
        for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
            for (std::size_t i = 0; i < z.size(); ++i)
                trial[i] = z[i] + step * dz[i];
            if (B.inside(trial) && B.value(trial, t) >= base + 0.25 * step * decrement) {
                moved = true;
                break;
            }
        }
        if (!moved)
            break;
        z = trial;
    }
    return steps;
}

inline constexpr double kPqpRadius = 1e9;

}  // namespace detail

/// A point y > 0 (in squared coordinates) strictly satisfying every constraint,
/// or nullopt when none exists inside the search radius.
[[nodiscard]] inline std::optional<Vector> pqp_slater_point(const PqpInstance& inst) {
    inst.validate();
    const std::size_t n = inst.size();
    Vector y(n, 1.0);
    const detail::Barrier plain(inst, false, detail::kPqpRadius);
    if (n == 0)
        return std::nullopt;
    {
        Vector z = y;
        bool ok = true;
        for (std::size_t k = 0; k < inst.constraints(); ++k)
            ok = ok && plain.constraint(k, z) > 0.0;
        if (ok)
            return y;
    }
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < inst.constraints(); ++k)
        worst = std::min(worst, plain.constraint(k, y));
    Vector z = y;
    z.push_back(worst - 1.0);
    const detail::Barrier phase1(inst, true, detail::kPqpRadius);
    const double m = static_cast<double>(n + inst.constraints() + 1);
    for (double t = 1.0; t < 1e12; t *= 10.0) {
        detail::center(phase1, z, t);
        if (z[n] > 0.0)
            return Vector(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
        if (z[n] + m / t < 0.0)
            return std::nullopt;  // the best achievable slack is negative
    }
    return std::nullopt;
}

/// Maximizes x^T M0 x over x >= 0 with x^T Mk x >= bk. Throws when no strictly
/// feasible point exists or the value is unbounded.
[[nodiscard]] inline PqpPrimalResult pqp_primal(const PqpInstance& inst, double tol = 1e-10) {
    const auto start = pqp_slater_point(inst);
    if (!start)
        throw StructureError("pqp_primal: no strictly feasible point found");
    const std::size_t n = inst.size();
    const detail::Barrier B(inst, false, detail::kPqpRadius);
    Vector y = *start;
    PqpPrimalResult res;
    const double m = static_cast<double>(n + inst.constraints() + 1);
    double t = 1.0;
    for (; t < 1e16; t *= 10.0) {
        res.newton_steps += detail::center(B, y, t);
        const double value = B.objective(y);
        if (m / t <= tol * std::max(1.0, std::abs(value)))
            break;
    }
    double sum = 0.0;
    for (double v : y)
        sum += v;
    if (sum > 0.5 * detail::kPqpRadius)
        throw NumericalError("pqp_primal: objective appears unbounded");
    res.x.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        res.x[i] = std::sqrt(y[i]);
    res.value = quadratic_form(inst.M0, res.x);
    return res;
}

/// Minimizes -sum tau_k b_k over tau >= 0 with M0 + sum tau_k Mk <= 0.
[[nodiscard]] inline PqpDualResult pqp_dual(const PqpInstance& inst, const CutOptions& opt = {}) {
    inst.validate();
    if (!pqp_slater_point(inst))
        throw StructureError("pqp_dual: no strictly feasible point (Slater condition fails)");
    AffineSymmetric F{inst.M0, inst.M};
    Vector cost(inst.constraints());
    for (std::size_t k = 0; k < cost.size(); ++k)
        cost[k] = -inst.b[k];
    PqpDualResult res;
    if (inst.constraints() == 0) {
        res.lambda_max = max_eigenvalue(inst.M0);
        if (res.lambda_max > opt.tol)
            throw NumericalError("pqp_dual: M0 is not negative semidefinite, primal unbounded");
        return res;
    }
    const CutResult cut = minimize_linear_nsd(F, cost, opt);
    if (cut.status == CutStatus::infeasible)
        throw NumericalError("pqp_dual: dual infeasible, primal unbounded");
    if (cut.status == CutStatus::unknown)
        throw NumericalError("pqp_dual: cutting planes did not converge");
    if (cut.at_upper)
        throw NumericalError("pqp_dual: multiplier reached the search bound, dual unbounded");
    res.tau = cut.z;
    res.value = cut.objective;
    res.lambda_max = cut.lambda_max;
    res.cuts = cut.cuts;
    return res;
}

// ---------------------------------------------------------------------------
// Edge-local decomposition of NSD symmetric Metzler matrices
// ---------------------------------------------------------------------------

struct NsdBlock {
    std::size_t k = 0, l = 0;  ///< k < l
    Matrix N;                  ///< 2x2, embedded at rows/cols (k, l)
};

struct NsdDecomposition {
    std::vector<NsdBlock> blocks;
    /// Diagonal entries of rows without off-diagonal entries (1x1 blocks).
    std::vector<std::pair<std::size_t, double>> isolated;

    [[nodiscard]] Matrix reconstruct(std::size_t n) const {
        Matrix S(n, n);
        for (const auto& blk : blocks) {
            S(blk.k, blk.k) += blk.N(0, 0);
            S(blk.k, blk.l) += blk.N(0, 1);
            S(blk.l, blk.k) += blk.N(1, 0);
            S(blk.l, blk.l) += blk.N(1, 1);
        }
        for (auto [i, d] : isolated)
            S(i, i) += d;
        return S;
    }
};

/// Writes M as a sum of NSD matrices each supported on one edge (k, l) of its
/// off-diagonal pattern. On each connected component with Perron vector v > 0
/// the edge block [[-m v_l/v_k, m], [m, -m v_k/v_l]] is rank one and NSD; the
/// leftover diagonal (the Perron root, <= 0) is spread over incident edges.
[[nodiscard]] inline NsdDecomposition nsd_decompose(const Matrix& M, double tol = 1e-9) {
    if (!M.is_square())
        throw DimensionError("nsd_decompose: matrix must be square");
    if (!is_symmetric(M, kDefaultTol) || !is_metzler(M, 0.0))
        throw StructureError("nsd_decompose: matrix must be symmetric Metzler");
    const std::size_t n = M.rows();
    if (n > 0 && max_eigenvalue(M) > tol)
        throw StructureError("nsd_decompose: matrix is not negative semidefinite");

    NsdDecomposition out;
    std::vector<std::size_t> degree(n, 0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            if (l != k && M(k, l) != 0.0)
                ++degree[k];

    for (const auto& comp : detail::strong_components(M)) {
        if (comp.size() == 1 && degree[comp[0]] == 0) {
            out.isolated.emplace_back(comp[0], M(comp[0], comp[0]));
            continue;
        }
        Matrix sub(comp.size(), comp.size());
        for (std::size_t a = 0; a < comp.size(); ++a)
            for (std::size_t c = 0; c < comp.size(); ++c)
                sub(a, c) = M(comp[a], comp[c]);
        const SymmetricEigen eig = symmetric_eigen(sub);
        Vector v = eig.vectors.col(comp.size() - 1);
        const double sign = std::accumulate(v.begin(), v.end(), 0.0) >= 0.0 ? 1.0 : -1.0;
        Vector pv(n, 0.0);
        for (std::size_t a = 0; a < comp.size(); ++a) {
            pv[comp[a]] = sign * v[a];
            if (!(pv[comp[a]] > 0.0))
                throw NumericalError("nsd_decompose: Perron vector is not strictly positive");
        }
        // Residual diagonal per node once the rank-one edge parts are removed.
        std::vector<double> residual(n, 0.0);
        for (std::size_t k : comp) {
            residual[k] = M(k, k);
            for (std::size_t l : comp)
                if (l != k && M(k, l) != 0.0)
                    residual[k] += M(k, l) * pv[l] / pv[k];
        }
        for (std::size_t k : comp)
            for (std::size_t l : comp) {
                if (l <= k || M(k, l) == 0.0)
                    continue;
                const double m = M(k, l);
                NsdBlock blk{k, l, Matrix(2, 2)};
                blk.N(0, 0) = -m * pv[l] / pv[k] + residual[k] / static_cast<double>(degree[k]);
                blk.N(1, 1) = -m * pv[k] / pv[l] + residual[l] / static_cast<double>(degree[l]);
                blk.N(0, 1) = blk.N(1, 0) = m;
                out.blocks.push_back(std::move(blk));
            }
    }
    return out;
}

}  // namespace posctl
