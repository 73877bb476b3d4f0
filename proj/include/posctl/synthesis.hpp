#pragma once

// Structured static output feedback u = L y with L diagonal and bounded, for
// the interconnection
//
//     [dx]   [A B E] [x]
//     [z ] = [C D G] [w] ,   u = L y.
//     [y ]   [F H 0] [u]
//
// Substituting mu = L (F xi + H 1) turns the bilinear certificate condition
// into a linear program over (xi, mu, gamma); the l1 variant works on the
// transposed interconnection with q = L (E^T p + G^T 1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "lp.hpp"
#include "performance.hpp"
#include "stability.hpp"

namespace posctl {

struct SynthesisProblem {
    Matrix A, B, C, D, E, F, G, H;
    Direction direction = Direction::linf;
    Vector bounds;                 ///< per gain upper bound; empty means all 1
    std::vector<bool> unbounded;   ///< per gain; empty means none
    TimeDomain domain = TimeDomain::continuous;

    [[nodiscard]] std::size_t states() const noexcept { return A.rows(); }
    [[nodiscard]] std::size_t gains() const noexcept { return E.cols(); }
    [[nodiscard]] std::size_t disturbances() const noexcept { return B.cols(); }
    [[nodiscard]] std::size_t outputs() const noexcept { return C.rows(); }

    [[nodiscard]] double bound(std::size_t k) const { return bounds.empty() ? 1.0 : bounds.at(k); }
    [[nodiscard]] bool is_unbounded(std::size_t k) const { return !unbounded.empty() && unbounded.at(k); }

    void validate_dimensions() const {
        const std::size_t n = A.rows(), k = B.cols(), l = C.rows(), m = E.cols();
        if (!A.is_square())
            throw DimensionError("synthesis: A must be square");
        if (B.rows() != n || C.cols() != n || E.rows() != n || F.cols() != n)
            throw DimensionError("synthesis: B, C, E, F must match the state dimension");
        if (D.rows() != l || D.cols() != k || G.rows() != l || G.cols() != m || F.rows() != m || H.rows() != m ||
            H.cols() != k)
            throw DimensionError("synthesis: inconsistent dimensions among D, F, G, H");
        if (!bounds.empty() && bounds.size() != m)
            throw DimensionError("synthesis: bounds length differs from gain count");
        if (!unbounded.empty() && unbounded.size() != m)
            throw DimensionError("synthesis: unbounded mask length differs from gain count");
        for (double b : bounds)
            if (!(b >= 0.0))
                throw std::invalid_argument("synthesis: gain bounds must be nonnegative");
    }

    /// Interconnection with every block transposed and the roles of (B,C),
    /// (E,F), (G,H) swapped; maps the l1 problem onto the linf one.
    [[nodiscard]] SynthesisProblem transposed() const {
        SynthesisProblem t;
        t.A = A.transpose();
        t.B = C.transpose();
        t.C = B.transpose();
        t.D = D.transpose();
        t.E = F.transpose();
        t.F = E.transpose();
        t.G = H.transpose();
        t.H = G.transpose();
        t.direction = direction == Direction::linf ? Direction::l1 : Direction::linf;
        t.bounds = bounds;
        t.unbounded = unbounded;
        t.domain = domain;
        return t;
    }
};

struct StructureReport {
    bool pass = true;
    std::vector<std::string> issues;
};

struct SynthesisResult {
    Matrix L;
    double gamma = 0.0;  ///< LP optimum of the gain bound
    PerformanceCertificate certificate;
    Vector mu_or_q;
    Vector denominators;
};

struct SynthesisReport {
    bool pass = true;
    std::vector<std::string> failures;
    double achieved_norm = 0.0;
    double spectrum = 0.0;  ///< closed-loop abscissa (continuous) or radius (discrete)
};

struct SynthesisOptions {
    std::optional<double> gamma;  ///< fixed bound instead of minimizing
};

/// Closed loop (A+ELF, B+ELH, C+GLF, D+GLH).
[[nodiscard]] inline PositiveStateSpace closed_loop(const SynthesisProblem& p, const Matrix& L) {
    const Matrix EL = p.E * L, GL = p.G * L;
    return {p.A + EL * p.F, p.B + EL * p.H, p.C + GL * p.F, p.D + GL * p.H, p.domain};
}

namespace detail {

inline std::string entry_name(const char* what, std::size_t i, std::size_t j) {
    std::ostringstream os;
    os << what << "(" << i << "," << j << ")";
    return os.str();
}

// Minimum over the gain box of X + Y diag(l) Z at entry (i,j).
inline double box_minimum(const SynthesisProblem& p, const Matrix& X, const Matrix& Y, const Matrix& Z,
                          std::size_t i, std::size_t j) {
    double v = X(i, j);
    for (std::size_t k = 0; k < p.gains(); ++k) {
        const double coeff = Y(i, k) * Z(k, j);
        if (coeff >= 0.0)
            continue;
        if (p.is_unbounded(k))
            return -std::numeric_limits<double>::infinity();
        v += coeff * p.bound(k);
    }
    return v;
}

}  // namespace detail

/// Checks that the closed loop keeps its sign structure for every admissible L.
/// Each entry is affine in the gains, so its minimum over the box is exact.
[[nodiscard]] inline StructureReport validate_structure(const SynthesisProblem& p) {
    StructureReport rep;
    try {
        p.validate_dimensions();
    } catch (const std::exception& e) {
        rep.pass = false;
        rep.issues.emplace_back(e.what());
        return rep;
    }
    const double tol = kDefaultTol;
    auto scan = [&](const char* name, const Matrix& X, const Matrix& Y, const Matrix& Z, bool skip_diag) {
        for (std::size_t i = 0; i < X.rows(); ++i)
            for (std::size_t j = 0; j < X.cols(); ++j) {
                if (skip_diag && i == j)
                    continue;
                if (detail::box_minimum(p, X, Y, Z, i, j) < -tol) {
                    rep.pass = false;
                    rep.issues.push_back(detail::entry_name(name, i, j) + " can become negative");
                }
            }
    };
    scan("A+ELF", p.A, p.E, p.F, p.domain == TimeDomain::continuous);
    scan("B+ELH", p.B, p.E, p.H, false);
    scan("C+GLF", p.C, p.G, p.F, false);
    scan("D+GLH", p.D, p.G, p.H, false);
    if (p.direction == Direction::linf && !is_nonnegative(p.F, tol)) {
        rep.pass = false;
        rep.issues.emplace_back("linf synthesis needs F >= 0");
    }
    if (p.direction == Direction::l1 &&
        (!is_nonnegative(p.B, tol) || !is_nonnegative(p.D, tol) || !is_nonnegative(p.E, tol))) {
        rep.pass = false;
        rep.issues.emplace_back("l1 synthesis needs B, D, E >= 0");
    }
    return rep;
}

/// L_kk = mu_k / den_k clamped to [0, bound_k].
[[nodiscard]] inline Matrix recover_gains(std::span<const double> mu, std::span<const double> den,
                                          std::span<const double> bounds) {
    if (mu.size() != den.size() || (!bounds.empty() && bounds.size() != mu.size()))
        throw DimensionError("recover_gains: length mismatch");
    constexpr double tiny = 1e-12;
    Matrix L(mu.size(), mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) {
        const double ub = bounds.empty() ? 1.0 : bounds[k];
        if (den[k] <= tiny) {
            if (mu[k] > tiny)
                throw NumericalError("recover_gains: positive mu with vanishing denominator");
            continue;
        }
        L(k, k) = std::clamp(mu[k] / den[k], 0.0, ub);
    }
    return L;
}

namespace detail {

struct LinfLayout {
    std::size_t n, m, l;
    [[nodiscard]] std::size_t xi(std::size_t i) const { return i; }
    [[nodiscard]] std::size_t mu(std::size_t k) const { return n + k; }
    [[nodiscard]] std::size_t gamma() const { return n + m; }
    [[nodiscard]] std::size_t vars() const { return n + m + 1; }
};

inline bool is_homogeneous(const SynthesisProblem& p) {
    return max_abs(p.B) == 0.0 && max_abs(p.D) == 0.0 && max_abs(p.H) == 0.0;
}

// Rows of the linf synthesis system; `gamma_fixed` pins the gamma variable.
inline lp::LinearProgram linf_program(const SynthesisProblem& p, std::optional<double> gamma_fixed) {
    const LinfLayout v{p.states(), p.gains(), p.outputs()};
    lp::Builder bld(v.vars());
    const Vector b1 = p.B * ones(p.disturbances());
    const Vector d1 = p.D * ones(p.disturbances());
    const Vector h1 = p.H * ones(p.disturbances());
    const bool discrete = p.domain == TimeDomain::discrete;

    for (std::size_t i = 0; i < v.n; ++i) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t j = 0; j < v.n; ++j)
            t.emplace_back(v.xi(j), p.A(i, j) - (discrete && i == j ? 1.0 : 0.0));
        for (std::size_t k = 0; k < v.m; ++k)
            t.emplace_back(v.mu(k), p.E(i, k));
        bld.add_row(t, -b1[i], true);
    }
    for (std::size_t i = 0; i < v.l; ++i) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t j = 0; j < v.n; ++j)
            t.emplace_back(v.xi(j), p.C(i, j));
        for (std::size_t k = 0; k < v.m; ++k)
            t.emplace_back(v.mu(k), p.G(i, k));
        t.emplace_back(v.gamma(), -1.0);
        bld.add_row(t, -d1[i], true);
    }
    for (std::size_t k = 0; k < v.m; ++k) {
        // mu_k <= b_k (F xi + H 1)_k, or (F xi + H 1)_k >= 0 for unbounded gains.
        const double scale = p.is_unbounded(k) ? 1.0 : p.bound(k);
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t j = 0; j < v.n; ++j)
            t.emplace_back(v.xi(j), -scale * p.F(k, j));
        if (!p.is_unbounded(k))
            t.emplace_back(v.mu(k), 1.0);
        bld.add_row(t, scale * h1[k]);
    }
    // xi > 0 is part of the certificate; without it an unbounded gain can pair
    // mu_k > 0 with a zero denominator.
    for (std::size_t i = 0; i < v.n; ++i)
        bld.add_row({{v.xi(i), -1.0}}, 0.0, true);
    if (is_homogeneous(p))
        for (std::size_t i = 0; i < v.n; ++i)
            bld.add_row({{v.xi(i), 1.0}}, static_cast<double>(v.n));
    if (gamma_fixed)
        bld.add_row({{v.gamma(), 1.0}}, *gamma_fixed, false, true);
    bld.set_objective(v.gamma(), 1.0);
    return bld.build();
}

// Solves the linf form (callers transpose l1 problems first).
inline std::optional<SynthesisResult> synthesize_linf(const SynthesisProblem& p, const SynthesisOptions& opt) {
    const LinfLayout v{p.states(), p.gains(), p.outputs()};
    double gamma_star = 0.0;
    if (opt.gamma) {
        gamma_star = *opt.gamma;
    } else if (v.l > 0) {
        const lp::Outcome relaxed = lp::solve(linf_program(p, std::nullopt));
        if (!relaxed.optimal())
            return std::nullopt;
        gamma_star = relaxed.objective;
    }

    const Vector h1 = p.H * ones(p.disturbances());
    double delta = opt.gamma ? 0.0 : 1e-7 * std::max(1.0, gamma_star);
    for (int attempt = 0; attempt < 2; ++attempt, delta *= 10.0) {
        const double gamma_cert = gamma_star + delta;
        if (v.l > 0 && !(gamma_cert > 0.0))
            return std::nullopt;
        const lp::Outcome out = lp::feasibility_with_margin(linf_program(p, gamma_cert));
        if (!out.optimal()) {
            if (opt.gamma)
                return std::nullopt;
            continue;
        }
        SynthesisResult r;
        Vector xi(out.y.begin(), out.y.begin() + static_cast<std::ptrdiff_t>(v.n));
        r.mu_or_q.assign(out.y.begin() + static_cast<std::ptrdiff_t>(v.n),
                         out.y.begin() + static_cast<std::ptrdiff_t>(v.n + v.m));
        r.denominators = p.F * xi + h1;
        Vector ub(v.m);
        for (std::size_t k = 0; k < v.m; ++k)
            ub[k] = p.is_unbounded(k) ? std::numeric_limits<double>::infinity() : p.bound(k);
        try {
            r.L = recover_gains(r.mu_or_q, r.denominators, ub);
        } catch (const NumericalError&) {
            continue;
        }
        r.gamma = opt.gamma ? *opt.gamma : gamma_star;
        r.certificate = PerformanceCertificate{Direction::linf, xi, gamma_cert, out.margin, p.domain};
        if (!certificate_rows(closed_loop(p, r.L), r.certificate).pass)
            continue;
        return r;
    }
    return std::nullopt;
}

}  // namespace detail

/// Minimizes the certified gain bound over admissible diagonal L.
///
/// `gamma` is the LP optimum; the returned certificate proves the strict bound
/// certificate.gamma, which exceeds it by a relative 1e-7 (or 1e-6 on retry).
[[nodiscard]] inline std::optional<SynthesisResult> synthesize(const SynthesisProblem& prob,
                                                               const SynthesisOptions& opt = {}) {
    const StructureReport rep = validate_structure(prob);
    if (!rep.pass)
        throw StructureError("synthesize: " + (rep.issues.empty() ? std::string("invalid structure") : rep.issues[0]));
    if (opt.gamma && !(*opt.gamma > 0.0))
        throw std::invalid_argument("synthesize: gamma must be positive");
    if (prob.direction == Direction::linf)
        return detail::synthesize_linf(prob, opt);
    std::optional<SynthesisResult> r = detail::synthesize_linf(prob.transposed(), opt);
    if (r)
        r->certificate.direction = Direction::l1;
    return r;
}

/// Residuals of the synthesis inequalities at a given point (xi, mu) or (p, q).
/// Strict rows pass when their slack is positive, gain-bound rows when it is
/// nonnegative.
[[nodiscard]] inline RowReport synthesis_rows(const SynthesisProblem& prob, std::span<const double> vec,
                                              std::span<const double> mu, double gamma) {
    prob.validate_dimensions();
    const SynthesisProblem p = prob.direction == Direction::linf ? prob : prob.transposed();
    if (vec.size() != p.states() || mu.size() != p.gains())
        throw DimensionError("synthesis_rows: point has wrong dimensions");
    const lp::LinearProgram lpp = detail::linf_program(p, std::nullopt);
    Vector y(vec.begin(), vec.end());
    y.insert(y.end(), mu.begin(), mu.end());
    y.push_back(gamma);
    const Vector My = lpp.M * y;
    RowReport rep;
    rep.pass = is_nonnegative(vec, 0.0) && is_nonnegative(mu, 0.0);
    const std::size_t strict_count = p.states() + p.outputs();
    for (std::size_t r = 0; r < strict_count + p.gains(); ++r) {
        const double slack = lpp.b[r] - My[r];
        const bool ok = r < strict_count ? slack > 0.0 : slack >= -1e-12;
        rep.rows.push_back({r, slack, ok});
        rep.pass = rep.pass && ok;
    }
    return rep;
}

/// Rebuilds the closed loop and re-checks sign structure, bounds, certificate
/// rows, stability and the achieved induced gain against certificate.gamma.
[[nodiscard]] inline SynthesisReport verify_synthesis(const SynthesisProblem& prob, const SynthesisResult& res) {
    SynthesisReport rep;
    auto fail = [&rep](std::string msg) {
        rep.pass = false;
        rep.failures.push_back(std::move(msg));
    };
    const std::size_t m = prob.gains();
    if (res.L.rows() != m || res.L.cols() != m) {
        fail("gain matrix has wrong size");
        return rep;
    }
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j)
            if (j != k && res.L(k, j) != 0.0)
                fail(detail::entry_name("L", k, j) + " is off-diagonal and nonzero");
        const double ub = prob.is_unbounded(k) ? std::numeric_limits<double>::infinity() : prob.bound(k);
        if (!(res.L(k, k) >= 0.0 && res.L(k, k) <= ub))
            fail(detail::entry_name("L", k, k) + " lies outside its bounds");
    }
    if (!rep.pass)
        return rep;
    const PositiveStateSpace cl = closed_loop(prob, res.L);
    try {
        cl.validate();
    } catch (const std::exception& e) {
        fail(std::string("closed loop: ") + e.what());
        return rep;
    }
    rep.spectrum = cl.domain == TimeDomain::continuous ? spectral_abscissa(cl.A) : spectral_radius(cl.A);
    if (!is_stable(cl)) {
        fail("closed loop is not stable");
        return rep;
    }
    if (res.certificate.vector.size() == cl.states() && !certificate_rows(cl, res.certificate).pass)
        fail("certificate rows do not hold on the closed loop");
    if (cl.outputs() > 0 && cl.inputs() > 0) {
        rep.achieved_norm = induced_norm(cl, prob.direction == Direction::linf ? INFINITY : 1.0);
        if (rep.achieved_norm > res.certificate.gamma + 1e-12)
            fail("achieved induced gain exceeds the certified bound");
    }
    return rep;
}

}  // namespace posctl
