#pragma once

/**
 * @file kyp.hpp
 * @brief The positive-systems KYP lemma: four equivalent conditions.
 *
 * For A Metzler Hurwitz (or nonnegative Schur), B >= 0 and Q nonnegative
 * except on its last m diagonal entries:
 *
 *   (1) the frequency inequality T(w)^* Q T(w) <= 0 on the whole axis/circle,
 *   (2) the same inequality at w = 0 only,
 *   (3) a diagonal P >= 0 making a linear matrix inequality hold,
 *   (4) a linear program in (x, u, p) with nonnegative variables.
 *
 * (1) is refuted or supported on a finite grid, (2) is an m x m eigenvalue
 * test, (3) runs eigenvector cutting planes over diag(P), (4) is a margin LP.
 */

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eigen_cuts.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "lp.hpp"

namespace posctl {

struct KypInstance {
    Matrix A, B, Q;
    TimeDomain domain = TimeDomain::continuous;

    [[nodiscard]] std::size_t states() const noexcept { return A.rows(); }
    [[nodiscard]] std::size_t inputs() const noexcept { return B.cols(); }

    void validate_dimensions() const {
        const std::size_t n = A.rows(), m = B.cols();
        if (!A.is_square() || B.rows() != n || Q.rows() != n + m || Q.cols() != n + m)
            throw DimensionError("kyp: A must be n x n, B n x m and Q (n+m) x (n+m)");
        if (!is_symmetric(Q, kDefaultTol))
            throw StructureError("kyp: Q must be symmetric");
    }

    /// Sign and stability hypotheses; throws StructureError naming the first violation.
    void validate() const {
        validate_dimensions();
        const std::size_t n = A.rows(), m = B.cols();
        if (domain == TimeDomain::continuous) {
            if (!is_metzler(A))
                throw StructureError("kyp: A must be Metzler");
            if (spectral_abscissa(A) >= 0.0)
                throw StructureError("kyp: A must be Hurwitz");
        } else {
            if (!is_nonnegative(A))
                throw StructureError("kyp: A must be nonnegative");
            if (spectral_radius(A) >= 1.0)
                throw StructureError("kyp: A must be Schur");
        }
        if (!is_nonnegative(B))
            throw StructureError("kyp: B must be nonnegative");
        for (std::size_t i = 0; i < n + m; ++i)
            for (std::size_t j = 0; j < n + m; ++j)
                if (!(i == j && i >= n) && Q(i, j) < -kDefaultTol)
                    throw StructureError("kyp: Q may be negative only on its last m diagonal entries");
    }
};

enum class Condition { holds, fails, unknown };

[[nodiscard]] inline const char* to_string(Condition c) {
    switch (c) {
    case Condition::holds:
        return "holds";
    case Condition::fails:
        return "fails";
    default:
        return "unknown";
    }
}

struct KypLpWitness {
    Vector x, u, p;
};

struct KypVerdict {
    Condition cond1 = Condition::unknown, cond2 = Condition::unknown, cond3 = Condition::unknown,
              cond4 = Condition::unknown;
    std::optional<Vector> P;
    std::optional<KypLpWitness> lp_witness;
    bool stabilizable = true;  ///< (-A, B) stabilizable, resp. (A, B) anti-stabilizable
    double static_lambda = 0.0;
    double cond3_lambda = 0.0;

    [[nodiscard]] bool all_agree() const {
        return cond1 == cond2 && cond2 == cond3 && cond3 == cond4 && cond1 != Condition::unknown;
    }
};

/// Rank of [B, AB, ..., A^{n-1}B] by Gaussian elimination with relative pivot tolerance.
[[nodiscard]] inline std::size_t controllability_rank(const Matrix& A, const Matrix& B) {
    const std::size_t n = A.rows(), m = B.cols();
    Matrix K(n, n * m);
    Matrix blk = B;
    for (std::size_t k = 0; k < n; ++k) {
        K.set_block(0, k * m, blk);
        blk = A * blk;
    }
    const double scale = std::max(max_abs(K), std::numeric_limits<double>::min());
    std::size_t rank = 0;
    for (std::size_t c = 0; c < K.cols() && rank < n; ++c) {
        std::size_t p = rank;
        for (std::size_t r = rank + 1; r < n; ++r)
            if (std::abs(K(r, c)) > std::abs(K(p, c)))
                p = r;
        if (std::abs(K(p, c)) <= 1e-10 * scale)
            continue;
        for (std::size_t j = 0; j < K.cols(); ++j)
            std::swap(K(rank, j), K(p, j));
        for (std::size_t r = rank + 1; r < n; ++r) {
            const double f = K(r, c) / K(rank, c);
            for (std::size_t j = c; j < K.cols(); ++j)
                K(r, j) -= f * K(rank, j);
        }
        ++rank;
    }
    return rank;
}

/// With A Hurwitz (Schur) every uncontrollable mode of -A (of A, seen from
/// outside the disk) is on the wrong side, so the hypothesis is controllability.
[[nodiscard]] inline bool kyp_stabilizable(const KypInstance& inst) {
    return controllability_rank(inst.A, inst.B) == inst.states();
}

namespace detail {

// [X; I] with X = -A^{-1}B (continuous) or (I - A)^{-1}B (discrete).
inline Matrix static_frame(const KypInstance& inst) {
    const std::size_t n = inst.states(), m = inst.inputs();
    const Matrix target = inst.domain == TimeDomain::continuous ? -1.0 * inst.A : Matrix::identity(n) - inst.A;
    LuDecomposition<double> lu(target);
    if (lu.singular())
        throw NumericalError(inst.domain == TimeDomain::continuous ? "kyp: A is singular" : "kyp: I - A is singular");
    return vertcat(lu.solve(inst.B), Matrix::identity(m));
}

inline double frequency_lambda(const KypInstance& inst, Complex z) {
    const std::size_t n = inst.states(), m = inst.inputs();
    CMatrix R(n, n), Bc(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            R(i, j) = (i == j ? z : Complex(0.0)) - inst.A(i, j);
        for (std::size_t j = 0; j < m; ++j)
            Bc(i, j) = inst.B(i, j);
    }
    const CMatrix X = solve(R, Bc);
    CMatrix T(n + m, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            T(i, j) = X(i, j);
    for (std::size_t j = 0; j < m; ++j)
        T(n + j, j) = 1.0;
    CMatrix H(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t c = 0; c < m; ++c) {
            Complex s = 0.0;
            for (std::size_t i = 0; i < n + m; ++i)
                for (std::size_t j = 0; j < n + m; ++j)
                    if (inst.Q(i, j) != 0.0)
                        s += std::conj(T(i, a)) * inst.Q(i, j) * T(j, c);
            H(a, c) = s;
        }
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t c = a; c < m; ++c) {
            const Complex avg = 0.5 * (H(a, c) + std::conj(H(c, a)));
            H(a, c) = avg;
            H(c, a) = std::conj(avg);
        }
    return max_eigenvalue(H);
}

}  // namespace detail

/// lambda_max of the static congruence (condition 2).
[[nodiscard]] inline double kyp_static_lambda(const KypInstance& inst) {
    inst.validate_dimensions();
    if (inst.inputs() == 0)
        return -std::numeric_limits<double>::infinity();
    const Matrix T = detail::static_frame(inst);
    Matrix S = T.transpose() * inst.Q * T;
    S = 0.5 * (S + S.transpose());
    return max_eigenvalue(S);
}

[[nodiscard]] inline bool kyp_static(const KypInstance& inst, double tol = 1e-9) {
    return kyp_static_lambda(inst) <= tol;
}

/// Positive frequencies: log-spaced on [1e-3, 1e3] (continuous) or uniform on
/// (0, pi] (discrete). The checks add w = 0 and, in continuous time, w = inf.
[[nodiscard]] inline Vector default_frequency_grid(TimeDomain domain, std::size_t points = 400) {
    Vector w(points);
    for (std::size_t k = 0; k < points; ++k) {
        const double s = points == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(points - 1);
        w[k] = domain == TimeDomain::continuous ? std::pow(10.0, -3.0 + 6.0 * s)
                                                : std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(points);
    }
    return w;
}

/// Largest frequency-inequality eigenvalue over the grid, plus w = 0 and w = inf.
[[nodiscard]] inline double kyp_frequency_lambda(const KypInstance& inst, std::span<const double> grid) {
    inst.validate_dimensions();
    if (grid.empty())
        throw std::invalid_argument("kyp_frequency: grid is empty");
    const std::size_t n = inst.states(), m = inst.inputs();
    if (m == 0)
        return -std::numeric_limits<double>::infinity();
    const bool discrete = inst.domain == TimeDomain::discrete;
    double worst = kyp_static_lambda(inst);
    for (double w : grid) {
        const Complex z = discrete ? std::polar(1.0, w) : Complex(0.0, w);
        worst = std::max(worst, detail::frequency_lambda(inst, z));
    }
    if (!discrete) {
        Matrix Q22 = inst.Q.block(n, n, m, m);
        worst = std::max(worst, max_eigenvalue(0.5 * (Q22 + Q22.transpose())));
    }
    return worst;
}

[[nodiscard]] inline bool kyp_frequency(const KypInstance& inst, std::span<const double> grid, double tol = 1e-7) {
    return kyp_frequency_lambda(inst, grid) <= tol;
}

/// The affine map diag(P) -> Q + [A^T P + P A, P B; B^T P, 0] (continuous) or
/// Q + [A^T P A - P, A^T P B; B^T P A, B^T P B] (discrete).
[[nodiscard]] inline AffineSymmetric kyp_lmi(const KypInstance& inst) {
    const std::size_t n = inst.states(), m = inst.inputs();
    AffineSymmetric F;
    F.F0 = 0.5 * (inst.Q + inst.Q.transpose());
    const Matrix AB = horzcat(inst.A, inst.B);
    for (std::size_t i = 0; i < n; ++i) {
        Matrix Fi(n + m, n + m);
        if (inst.domain == TimeDomain::continuous) {
            for (std::size_t j = 0; j < n + m; ++j) {
                Fi(i, j) += AB(i, j);
                Fi(j, i) += AB(i, j);
            }
        } else {
            for (std::size_t a = 0; a < n + m; ++a)
                for (std::size_t c = 0; c < n + m; ++c)
                    Fi(a, c) = AB(i, a) * AB(i, c);
            Fi(i, i) -= 1.0;
        }
        F.F.push_back(std::move(Fi));
    }
    return F;
}

struct DiagonalPResult {
    Condition status = Condition::unknown;
    Vector P;
    double lambda_max = 0.0;
    double lower_bound = 0.0;
    int cuts = 0;
};

/// Searches diag(P) in [0, upper]^n for condition 3.
[[nodiscard]] inline DiagonalPResult kyp_diagonal_P(const KypInstance& inst, const CutOptions& opt = {}) {
    inst.validate_dimensions();
    const AffineSymmetric F = kyp_lmi(inst);
    DiagonalPResult res;
    const double q_lambda = max_eigenvalue(F.F0);
    if (q_lambda <= opt.tol) {
        res.status = Condition::holds;
        res.P.assign(inst.states(), 0.0);
        res.lambda_max = q_lambda;
        return res;
    }
    const CutResult cut = minimize_lambda_max(F, opt);
    res.P = cut.z;
    res.lambda_max = cut.lambda_max;
    res.lower_bound = cut.lower_bound;
    res.cuts = cut.cuts;
    res.status = cut.status == CutStatus::feasible     ? Condition::holds
                 : cut.status == CutStatus::infeasible ? Condition::fails
                                                       : Condition::unknown;
    return res;
}

/// lambda_max of the condition 3 matrix at a given diag(P).
[[nodiscard]] inline double kyp_lmi_lambda(const KypInstance& inst, std::span<const double> P) {
    return max_eigenvalue(kyp_lmi(inst)(P));
}

/// Largest violation of the condition 4 inequalities (<= 0 means satisfied);
/// also requires u > 0 componentwise.
[[nodiscard]] inline double kyp_lp_violation(const KypInstance& inst, const KypLpWitness& w) {
    const std::size_t n = inst.states(), m = inst.inputs();
    if (w.x.size() != n || w.u.size() != m || w.p.size() != n)
        throw DimensionError("kyp: witness has wrong dimensions");
    double worst = -std::numeric_limits<double>::infinity();
    for (double v : w.x)
        worst = std::max(worst, -v);
    for (double v : w.p)
        worst = std::max(worst, -v);
    for (double v : w.u)
        worst = std::max(worst, -v);
    const Vector Ax = inst.A * w.x, Bu = inst.B * w.u;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, inst.domain == TimeDomain::continuous ? Ax[i] + Bu[i] : Ax[i] + Bu[i] - w.x[i]);
    Vector xu = w.x;
    xu.insert(xu.end(), w.u.begin(), w.u.end());
    const Vector Qxu = inst.Q * xu;
    const Vector Atp = inst.A.transpose() * w.p, Btp = inst.B.transpose() * w.p;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, Qxu[i] + Atp[i] - (inst.domain == TimeDomain::discrete ? w.p[i] : 0.0));
    for (std::size_t j = 0; j < m; ++j)
        worst = std::max(worst, Qxu[n + j] + Btp[j]);
    return worst;
}

/// Condition 4 as a margin LP over (x, u, p) >= 0 with u > 0 and sum(u) = 1.
/// Returns nullopt when no strictly positive u exists.
[[nodiscard]] inline std::optional<KypLpWitness> kyp_lp_certificate(const KypInstance& inst) {
    inst.validate_dimensions();
    const std::size_t n = inst.states(), m = inst.inputs();
    const bool discrete = inst.domain == TimeDomain::discrete;
    const std::size_t X = 0, U = n, P = n + m, N = 2 * n + m;
    lp::Builder b(N);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t j = 0; j < n; ++j)
            row.emplace_back(X + j, inst.A(i, j) - (discrete && i == j ? 1.0 : 0.0));
        for (std::size_t j = 0; j < m; ++j)
            row.emplace_back(U + j, inst.B(i, j));
        b.add_row(row, 0.0);
    }
    for (std::size_t r = 0; r < n + m; ++r) {
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t j = 0; j < n + m; ++j)
            row.emplace_back(j, inst.Q(r, j));
        for (std::size_t i = 0; i < n; ++i) {
            const double coeff = r < n ? inst.A(i, r) - (discrete && i == r ? 1.0 : 0.0) : inst.B(i, r - n);
            row.emplace_back(P + i, coeff);
        }
        b.add_row(row, 0.0);
    }
    for (std::size_t j = 0; j < m; ++j)
        b.add_row({{U + j, -1.0}}, 0.0, true);
    std::vector<std::pair<std::size_t, double>> norm;
    for (std::size_t j = 0; j < m; ++j)
        norm.emplace_back(U + j, 1.0);
    b.add_row(norm, 1.0, false, true);
    if (m == 0)
        return KypLpWitness{Vector(n, 0.0), {}, Vector(n, 0.0)};
    const lp::Outcome out = lp::feasibility_with_margin(b.build());
    if (!out.optimal())
        return std::nullopt;
    KypLpWitness w;
    w.x.assign(out.y.begin(), out.y.begin() + static_cast<std::ptrdiff_t>(n));
    w.u.assign(out.y.begin() + static_cast<std::ptrdiff_t>(U), out.y.begin() + static_cast<std::ptrdiff_t>(P));
    w.p.assign(out.y.begin() + static_cast<std::ptrdiff_t>(P), out.y.end());
    return w;
}

struct KypOptions {
    Vector grid;  ///< empty selects default_frequency_grid
    CutOptions cuts;
    double static_tol = 1e-9;
    double frequency_tol = 1e-7;
};

/// Evaluates all four conditions independently; witnesses are re-verified.
[[nodiscard]] inline KypVerdict kyp_conditions(const KypInstance& inst, const KypOptions& opt = {}) {
    inst.validate_dimensions();
    KypVerdict v;
    v.stabilizable = kyp_stabilizable(inst);
    const Vector grid = opt.grid.empty() ? default_frequency_grid(inst.domain) : opt.grid;
    v.cond1 = kyp_frequency(inst, grid, opt.frequency_tol) ? Condition::holds : Condition::fails;
    v.static_lambda = kyp_static_lambda(inst);
    v.cond2 = v.static_lambda <= opt.static_tol ? Condition::holds : Condition::fails;
    const DiagonalPResult P = kyp_diagonal_P(inst, opt.cuts);
    v.cond3 = P.status;
    v.cond3_lambda = P.lambda_max;
    if (P.status == Condition::holds) {
        if (kyp_lmi_lambda(inst, P.P) > opt.cuts.tol)
            throw NumericalError("kyp: diagonal P failed re-verification");
        v.P = P.P;
    }
    if (auto w = kyp_lp_certificate(inst)) {
        if (kyp_lp_violation(inst, *w) > 1e-8)
            throw NumericalError("kyp: LP witness failed re-verification");
        v.cond4 = Condition::holds;
        v.lp_witness = std::move(w);
    } else {
        v.cond4 = Condition::fails;
    }
    return v;
}

/// Checks the hypotheses, then evaluates the conditions.
[[nodiscard]] inline KypVerdict kyp_verdict(const KypInstance& inst, const KypOptions& opt = {}) {
    inst.validate();
    return kyp_conditions(inst, opt);
}

/// Cayley transform of a discrete instance into a continuous one, with the
/// maps that carry witnesses back.
struct BilinearTransform {
    KypInstance continuous;
    Matrix S;  ///< [(A+I)^{-1}, -(A+I)^{-1}B; 0, I]

    /// (x, u) = S (xhat, u).
    [[nodiscard]] std::pair<Vector, Vector> map_state(std::span<const double> xhat, std::span<const double> u) const {
        Vector xu(xhat.begin(), xhat.end());
        xu.insert(xu.end(), u.begin(), u.end());
        const Vector out = S * xu;
        const std::size_t n = xhat.size();
        return {Vector(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n)),
                Vector(out.begin() + static_cast<std::ptrdiff_t>(n), out.end())};
    }
    /// The continuous-side P corresponds to 2P on the discrete side.
    [[nodiscard]] static Vector map_P(std::span<const double> Phat) {
        Vector P(Phat.begin(), Phat.end());
        for (double& v : P)
            v *= 2.0;
        return P;
    }
};

[[nodiscard]] inline BilinearTransform bilinear_transform(const KypInstance& inst) {
    if (inst.domain != TimeDomain::discrete)
        throw std::invalid_argument("bilinear_transform: instance must be discrete");
    inst.validate_dimensions();
    const std::size_t n = inst.states(), m = inst.inputs();
    const Matrix I = Matrix::identity(n);
    const LuDecomposition<double> lu(inst.A + I);
    if (lu.singular())
        throw NumericalError("bilinear_transform: A + I is singular");
    const Matrix inv = lu.inverse();
    BilinearTransform t;
    t.continuous.A = (inst.A - I) * inv;
    t.continuous.B = 2.0 * (inv * inst.B);
    t.S = Matrix(n + m, n + m);
    t.S.set_block(0, 0, inv);
    t.S.set_block(0, n, -1.0 * (inv * inst.B));
    t.S.set_block(n, n, Matrix::identity(m));
    Matrix Qh = t.S.transpose() * inst.Q * t.S;
    t.continuous.Q = 0.5 * (Qh + Qh.transpose());
    t.continuous.domain = TimeDomain::continuous;
    return t;
}

/// Discrete verdict computed on the transformed continuous instance. Witnesses
/// are mapped back and kept only when they re-verify on the discrete instance.
[[nodiscard]] inline KypVerdict kyp_conditions_via_transform(const KypInstance& inst, const KypOptions& opt = {}) {
    const BilinearTransform t = bilinear_transform(inst);
    KypOptions copt = opt;
    if (!opt.grid.empty()) {
        // e^{iw} = (1 + i v)/(1 - i v) with v = tan(w/2).
        copt.grid.clear();
        for (double w : opt.grid)
            if (w < std::numbers::pi)
                copt.grid.push_back(std::tan(0.5 * w));
    }
    KypVerdict v = kyp_conditions(t.continuous, copt);
    v.stabilizable = kyp_stabilizable(inst);
    if (v.P) {
        Vector P = BilinearTransform::map_P(*v.P);
        if (kyp_lmi_lambda(inst, P) <= opt.cuts.tol)
            v.P = std::move(P);
        else
            v.P.reset();
    }
    if (v.lp_witness) {
        auto [x, u] = t.map_state(v.lp_witness->x, v.lp_witness->u);
        KypLpWitness w{std::move(x), std::move(u), v.lp_witness->p};
        if (kyp_lp_violation(inst, w) <= 1e-8)
            v.lp_witness = std::move(w);
        else
            v.lp_witness.reset();
    }
    return v;
}

}  // namespace posctl
