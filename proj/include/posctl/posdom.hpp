#pragma once

/**
 * @file posdom.hpp
 * @brief Rational transfer functions dominated by their static gain.
 *
 * f = b/a is positively dominated when |f(iw)| <= f(0) for every real w. With
 * t = w^2 this is the polynomial inequality
 *
 *     h(t) = |a(iw)|^2 b(0)^2 - |b(iw)|^2 a(0)^2 >= 0   for t >= 0,
 *
 * plus f(0) >= 0. h(0) = 0 identically, so the lowest power of t is divided
 * out and the sign of the remainder on (0, inf) is settled by Sturm root
 * isolation.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "performance.hpp"
#include "polynomial.hpp"
#include "synthesis.hpp"

namespace posctl {

namespace detail {

// Removes approximately common roots (within tol) of num and den.
inline void cancel_common_roots(Polynomial& num, Polynomial& den, double tol) {
    if (num.degree() < 1 || den.degree() < 1)
        return;
    std::vector<Complex> rn = roots(num), rd = roots(den);
    std::vector<bool> used(rd.size(), false);
    Polynomial n2 = num, d2 = den;
    for (Complex z : rn) {
        if (z.imag() < 0.0)
            continue;  // conjugate pairs are handled from the upper half plane
        for (std::size_t j = 0; j < rd.size(); ++j) {
            if (used[j] || std::abs(rd[j] - z) > tol * std::max(1.0, std::abs(z)))
                continue;
            const bool real = z.imag() == 0.0 && rd[j].imag() == 0.0;
            const Complex c = 0.5 * (z + rd[j]);
            const Polynomial factor =
                real ? Polynomial{-c.real(), 1.0} : Polynomial{std::norm(c), -2.0 * c.real(), 1.0};
            if (!real) {
                // The conjugate of rd[j] must be present and unused as well.
                std::size_t partner = rd.size();
                for (std::size_t k = 0; k < rd.size(); ++k)
                    if (k != j && !used[k] && std::abs(rd[k] - std::conj(rd[j])) <= tol * std::max(1.0, std::abs(z)))
                        partner = k;
                if (partner == rd.size())
                    break;
                used[partner] = true;
            }
            auto [qn, remn] = n2.divide(factor);
            auto [qd, remd] = d2.divide(factor);
            const double sn = std::max(1.0, n2.max_abs_coeff()), sd = std::max(1.0, d2.max_abs_coeff());
            if (remn.max_abs_coeff() > 1e-7 * sn || remd.max_abs_coeff() > 1e-7 * sd)
                return;  // keep the unreduced (exact) form
            used[j] = true;
            n2 = qn;
            d2 = qd;
            break;
        }
    }
    num = n2;
    den = d2;
}

}  // namespace detail

/// Scalar rational function num/den in the Laplace variable s.
class RationalFunction {
public:
    static constexpr double kCancelTol = 1e-8;

    RationalFunction() : num_{}, den_{1.0} {}
    RationalFunction(Polynomial num, Polynomial den, bool reduce = true) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero())
            throw std::invalid_argument("rational function: denominator is identically zero");
        if (reduce && !num_.is_zero())
            detail::cancel_common_roots(num_, den_, kCancelTol);
        normalize();
    }
    static RationalFunction constant(double v) { return {Polynomial::constant(v), Polynomial{1.0}}; }

    [[nodiscard]] const Polynomial& num() const noexcept { return num_; }
    [[nodiscard]] const Polynomial& den() const noexcept { return den_; }
    [[nodiscard]] bool is_zero() const noexcept { return num_.is_zero(); }

    [[nodiscard]] Complex operator()(Complex s) const { return num_(s) / den_(s); }

    /// f(0); throws when the denominator vanishes at the origin.
    [[nodiscard]] double at_zero() const {
        const double d0 = den_.coeff(0);
        if (d0 == 0.0)
            throw std::domain_error("rational function: value at s = 0 is undefined");
        return num_.coeff(0) / d0;
    }

    [[nodiscard]] bool proper() const noexcept { return num_.degree() <= den_.degree(); }

    friend RationalFunction operator+(const RationalFunction& f, const RationalFunction& g) {
        if (f.is_zero())
            return g;
        if (g.is_zero())
            return f;
        if (f.den_ == g.den_)
            return {f.num_ + g.num_, f.den_};
        return {f.num_ * g.den_ + g.num_ * f.den_, f.den_ * g.den_};
    }
    friend RationalFunction operator*(const RationalFunction& f, const RationalFunction& g) {
        if (f.is_zero() || g.is_zero())
            return {};
        return {f.num_ * g.num_, f.den_ * g.den_};
    }
    friend RationalFunction operator*(double a, const RationalFunction& f) {
        return {a * f.num_, f.den_, false};
    }
    friend RationalFunction operator-(const RationalFunction& f) { return (-1.0) * f; }
    friend RationalFunction operator-(const RationalFunction& f, const RationalFunction& g) { return f + (-g); }
    friend RationalFunction operator/(const RationalFunction& f, const RationalFunction& g) {
        if (g.is_zero())
            throw NumericalError("rational function: division by zero");
        return {f.num_ * g.den_, f.den_ * g.num_};
    }

private:
    void normalize() {
        const double lead = den_.leading();
        num_ *= 1.0 / lead;
        den_ *= 1.0 / lead;
    }
    Polynomial num_, den_;
};

/// Pole location test on the denominator.
[[nodiscard]] inline HurwitzVerdict tf_stability(const RationalFunction& f) { return routh_hurwitz(f.den()); }

[[nodiscard]] inline bool tf_stable(const RationalFunction& f) {
    return tf_stability(f) == HurwitzVerdict::stable;
}

struct DominanceResult {
    bool dominated = false;
    std::optional<double> witness_omega;  ///< a frequency with |f(iw)| > f(0)
};

/// Decides |f(iw)| <= f(0) for all real w by exact sign analysis of h(t).
[[nodiscard]] inline DominanceResult dominance_test(const RationalFunction& f) {
    if (!tf_stable(f))
        throw StructureError("dominance test: rational function is not stable");
    const double a0 = f.den().coeff(0);
    const double b0 = f.num().coeff(0);
    if (a0 == 0.0)
        throw std::domain_error("dominance test: value at s = 0 is undefined");
    if (f.is_zero())
        return {true, std::nullopt};
    if (b0 / a0 < 0.0)
        return {false, 0.0};
    if (!f.proper())
        return {false, std::numeric_limits<double>::infinity()};

    Polynomial h = f.den().magnitude_squared_on_axis() * (b0 * b0) - f.num().magnitude_squared_on_axis() * (a0 * a0);
    std::vector<double> c(h.coeffs());
    if (!c.empty())
        c[0] = 0.0;
    h = Polynomial(c).chopped(1e-13);
    if (h.is_zero())
        return {true, std::nullopt};
    std::size_t low = 0;
    while (h.coeff(low) == 0.0)
        ++low;
    h = Polynomial(std::vector<double>(h.coeffs().begin() + static_cast<std::ptrdiff_t>(low), h.coeffs().end()));

    // Root isolation on (0, U] with U a Cauchy bound.
    double upper = 1.0;
    for (int k = 0; k < h.degree(); ++k)
        upper = std::max(upper, 1.0 + std::abs(h.coeff(static_cast<std::size_t>(k)) / h.leading()));
    const SturmSequence sturm(h);
    std::vector<double> samples{0.0};
    std::vector<std::pair<double, double>> stack{{0.0, upper}};
    std::vector<std::pair<double, double>> isolated;
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        const int cnt = sturm.count(lo, hi);
        if (cnt <= 0)
            continue;
        if (cnt == 1 || hi - lo <= 1e-14 * std::max(1.0, hi)) {
            isolated.emplace_back(lo, hi);
            continue;
        }
        const double mid = 0.5 * (lo + hi);
        stack.emplace_back(lo, mid);
        stack.emplace_back(mid, hi);
    }
    for (auto [lo, hi] : isolated) {
        samples.push_back(lo);
        samples.push_back(hi);
        samples.push_back(0.5 * (lo + hi));
    }
    samples.push_back(2.0 * upper);
    std::sort(samples.begin(), samples.end());
    // A point strictly inside (0, first sample] probes the sign just right of 0.
    const double first_positive = samples.size() > 1 ? *std::upper_bound(samples.begin(), samples.end(), 0.0) : upper;
    samples.push_back(0.5 * first_positive);

    const double scale = h.max_abs_coeff();
    double worst = 0.0;
    double worst_t = 0.0;
    for (double t : samples) {
        const double v = t == 0.0 ? h.coeff(0) : h(t);
        const double mag = scale * std::pow(std::max(1.0, t), h.degree());
        if (v < -1e-12 * mag && v / mag < worst) {
            worst = v / mag;
            worst_t = t == 0.0 ? 0.5 * first_positive : t;
        }
    }
    if (worst < 0.0)
        return {false, std::sqrt(worst_t)};
    return {true, std::nullopt};
}

[[nodiscard]] inline bool is_positively_dominated(const RationalFunction& f) { return dominance_test(f).dominated; }

/// Dense matrix of rational functions.
class RationalTransferMatrix {
public:
    RationalTransferMatrix() = default;
    RationalTransferMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

    static RationalTransferMatrix identity(std::size_t n) {
        RationalTransferMatrix I(n, n);
        for (std::size_t i = 0; i < n; ++i)
            I(i, i) = RationalFunction::constant(1.0);
        return I;
    }
    static RationalTransferMatrix from_constant(const Matrix& M) {
        RationalTransferMatrix R(M.rows(), M.cols());
        for (std::size_t i = 0; i < M.rows(); ++i)
            for (std::size_t j = 0; j < M.cols(); ++j)
                if (M(i, j) != 0.0)
                    R(i, j) = RationalFunction::constant(M(i, j));
        return R;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    RationalFunction& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const RationalFunction& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    [[nodiscard]] CMatrix evaluate(Complex s) const {
        CMatrix out(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out(i, j) = (*this)(i, j)(s);
        return out;
    }

    [[nodiscard]] Matrix static_gain() const {
        Matrix out(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out(i, j) = (*this)(i, j).at_zero();
        return out;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<RationalFunction> e_;
};

[[nodiscard]] inline RationalTransferMatrix tf_add(const RationalTransferMatrix& G, const RationalTransferMatrix& H) {
    if (G.rows() != H.rows() || G.cols() != H.cols())
        throw DimensionError("tf_add: dimension mismatch");
    RationalTransferMatrix R(G.rows(), G.cols());
    for (std::size_t i = 0; i < G.rows(); ++i)
        for (std::size_t j = 0; j < G.cols(); ++j)
            R(i, j) = G(i, j) + H(i, j);
    return R;
}

[[nodiscard]] inline RationalTransferMatrix tf_scale(double a, const RationalTransferMatrix& G) {
    RationalTransferMatrix R(G.rows(), G.cols());
    for (std::size_t i = 0; i < G.rows(); ++i)
        for (std::size_t j = 0; j < G.cols(); ++j)
            R(i, j) = a * G(i, j);
    return R;
}

[[nodiscard]] inline RationalTransferMatrix tf_mul(const RationalTransferMatrix& G, const RationalTransferMatrix& H) {
    if (G.cols() != H.rows())
        throw DimensionError("tf_mul: inner dimensions differ");
    RationalTransferMatrix R(G.rows(), H.cols());
    for (std::size_t i = 0; i < G.rows(); ++i)
        for (std::size_t j = 0; j < H.cols(); ++j) {
            RationalFunction acc;
            for (std::size_t k = 0; k < G.cols(); ++k)
                if (!G(i, k).is_zero() && !H(k, j).is_zero())
                    acc = acc + G(i, k) * H(k, j);
            R(i, j) = acc;
        }
    return R;
}

[[nodiscard]] inline bool matrix_dominated(const RationalTransferMatrix& G) {
    for (std::size_t i = 0; i < G.rows(); ++i)
        for (std::size_t j = 0; j < G.cols(); ++j)
            if (!is_positively_dominated(G(i, j)))
                return false;
    return true;
}

/// H-infinity norm of a dominated matrix: the largest singular value of G(0).
[[nodiscard]] inline double hinf_norm_dominated(const RationalTransferMatrix& G) {
    if (!matrix_dominated(G))
        throw StructureError("hinf_norm_dominated: matrix is not positively dominated");
    return matrix_norm(G.static_gain(), 2.0);
}

/// True iff (I - G)^{-1} is stable and dominated, i.e. G(0) is Schur.
[[nodiscard]] inline bool feedback_wellposed(const RationalTransferMatrix& G) {
    if (G.rows() != G.cols())
        throw DimensionError("feedback_wellposed: matrix must be square");
    if (!matrix_dominated(G))
        throw StructureError("feedback_wellposed: matrix is not positively dominated");
    return spectral_radius(G.static_gain()) < 1.0;
}

namespace detail {

inline RationalFunction rational_determinant(const RationalTransferMatrix& M) {
    const std::size_t n = M.rows();
    if (n == 0)
        return RationalFunction::constant(1.0);
    if (n == 1)
        return M(0, 0);
    RationalFunction det;
    for (std::size_t j = 0; j < n; ++j) {
        if (M(0, j).is_zero())
            continue;
        RationalTransferMatrix minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r)
            for (std::size_t c = 0, cc = 0; c < n; ++c)
                if (c != j)
                    minor(r - 1, cc++) = M(r, c);
        const RationalFunction term = M(0, j) * rational_determinant(minor);
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

}  // namespace detail

/// (I - G)^{-1} by the adjugate formula; refuses unless G(0) is Schur.
[[nodiscard]] inline RationalTransferMatrix feedback_inverse(const RationalTransferMatrix& G) {
    if (!feedback_wellposed(G))
        throw StructureError("feedback_inverse: G(0) is not Schur");
    const std::size_t n = G.rows();
    const RationalTransferMatrix M = tf_add(RationalTransferMatrix::identity(n), tf_scale(-1.0, G));
    const RationalFunction det = detail::rational_determinant(M);
    RationalTransferMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            RationalTransferMatrix minor(n - 1, n - 1);
            for (std::size_t r = 0, rr = 0; r < n; ++r) {
                if (r == j)
                    continue;
                for (std::size_t c = 0, cc = 0; c < n; ++c)
                    if (c != i)
                        minor(rr, cc++) = M(r, c);
                ++rr;
            }
            const RationalFunction cof = detail::rational_determinant(minor);
            inv(i, j) = ((i + j) % 2 == 0 ? cof : -cof) / det;
        }
    return inv;
}

/// Interconnection X = (A + E L F) X + B W, Z = C X + D W with dominated
/// blocks; the gain L is diagonal with entries in [0, bounds].
struct DominatedSynthesisProblem {
    RationalTransferMatrix A, B, C, D, E, F;
    Vector bounds;  ///< empty means all 1

    [[nodiscard]] double bound(std::size_t k) const { return bounds.empty() ? 1.0 : bounds.at(k); }
};

struct HypothesisReport {
    bool pass = true;
    std::vector<std::string> issues;
};

/// Checks B, C, D, E dominated and A + E L F dominated on the whole gain box.
/// Each entry of A + E L F is affine in L; |f(iw)| is convex and f(0) affine in
/// L, so dominance at the box vertices implies it everywhere in the box.
[[nodiscard]] inline HypothesisReport check_dominated_hypotheses(const DominatedSynthesisProblem& p) {
    HypothesisReport rep;
    const std::size_t n = p.A.rows(), m = p.E.cols();
    if (p.A.cols() != n || p.B.rows() != n || p.C.cols() != n || p.E.rows() != n || p.F.rows() != m ||
        p.F.cols() != n || p.D.rows() != p.C.rows() || p.D.cols() != p.B.cols() ||
        (!p.bounds.empty() && p.bounds.size() != m)) {
        rep.pass = false;
        rep.issues.emplace_back("inconsistent dimensions");
        return rep;
    }
    auto check = [&](const char* name, const RationalTransferMatrix& X) {
        try {
            if (!matrix_dominated(X)) {
                rep.pass = false;
                rep.issues.push_back(std::string(name) + " is not positively dominated");
            }
        } catch (const std::exception& e) {
            rep.pass = false;
            rep.issues.push_back(std::string(name) + ": " + e.what());
        }
    };
    check("B", p.B);
    check("C", p.C);
    check("D", p.D);
    check("E", p.E);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<std::size_t> active;
            std::vector<RationalFunction> terms;
            for (std::size_t k = 0; k < m; ++k)
                if (!p.E(i, k).is_zero() && !p.F(k, j).is_zero()) {
                    active.push_back(k);
                    terms.push_back(p.E(i, k) * p.F(k, j));
                }
            if (active.size() > 16)
                throw std::length_error("check_dominated_hypotheses: too many gains act on one entry");
            for (std::size_t mask = 0; mask < (std::size_t{1} << active.size()); ++mask) {
                RationalFunction f = p.A(i, j);
                for (std::size_t t = 0; t < active.size(); ++t)
                    if (mask & (std::size_t{1} << t))
                        f = f + p.bound(active[t]) * terms[t];
                bool ok = false;
                try {
                    ok = is_positively_dominated(f);
                } catch (const std::exception&) {
                    ok = false;
                }
                if (!ok) {
                    rep.pass = false;
                    rep.issues.push_back("A+ELF(" + std::to_string(i) + "," + std::to_string(j) +
                                         ") is not dominated at a gain-box vertex");
                    break;
                }
            }
        }
    return rep;
}

/// Static-gain data of the dominated problem as a discrete-time l1 synthesis.
[[nodiscard]] inline SynthesisProblem static_synthesis_problem(const DominatedSynthesisProblem& p) {
    SynthesisProblem s;
    s.A = p.A.static_gain();
    s.B = p.B.static_gain();
    s.C = p.C.static_gain();
    s.D = p.D.static_gain();
    s.E = p.E.static_gain();
    s.F = p.F.static_gain();
    s.G = Matrix(s.C.rows(), s.E.cols());
    s.H = Matrix(s.F.rows(), s.B.cols());
    s.direction = Direction::l1;
    s.domain = TimeDomain::discrete;
    s.bounds = p.bounds;
    return s;
}

/// Minimizes the 1-induced gain of C (I - A - E L F)^{-1} B + D over the box.
[[nodiscard]] inline std::optional<SynthesisResult> synthesize_dominated(const DominatedSynthesisProblem& p) {
    const HypothesisReport rep = check_dominated_hypotheses(p);
    if (!rep.pass)
        throw StructureError("synthesize_dominated: " + rep.issues.front());
    return synthesize(static_synthesis_problem(p));
}

/// Closed-loop transfer matrix C (I - A - E L F)^{-1} B + D.
[[nodiscard]] inline RationalTransferMatrix dominated_closed_loop(const DominatedSynthesisProblem& p, const Matrix& L) {
    const RationalTransferMatrix loop = tf_add(p.A, tf_mul(tf_mul(p.E, RationalTransferMatrix::from_constant(L)), p.F));
    return tf_add(tf_mul(tf_mul(p.C, feedback_inverse(loop)), p.B), p.D);
}

/// Vehicle chain with inertia: x_i'' = sum_j l_ij (x_j - x_i) + u_i + w_i under
/// local control u_i = -k x_i - d_i x_i' with d_i = k + sum_j lbar_ij, from w_1
/// to x_1. Gains are ordered (1,2),(2,1),(2,3),(3,2),... along the chain.
struct InertialFormation {
    DominatedSynthesisProblem problem;
    std::vector<std::pair<std::size_t, std::size_t>> gain_pairs;
};

[[nodiscard]] inline InertialFormation inertial_formation(std::size_t vehicles, double stiffness = 1.0,
                                                          double lbar = 1.0) {
    if (vehicles < 2)
        throw std::invalid_argument("inertial_formation: need at least two vehicles");
    const std::size_t n = vehicles;
    InertialFormation out;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        out.gain_pairs.emplace_back(i, i + 1);
        out.gain_pairs.emplace_back(i + 1, i);
    }
    const std::size_t m = out.gain_pairs.size();
    std::vector<double> lsum(n, 0.0);
    for (auto [i, j] : out.gain_pairs)
        lsum[i] += lbar;
    std::vector<RationalFunction> inv_den(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = stiffness + lsum[i];
        const double damping = stiffness + lsum[i];
        inv_den[i] = RationalFunction(Polynomial{1.0}, Polynomial{c, damping, 1.0});
    }
    DominatedSynthesisProblem& p = out.problem;
    p.A = RationalTransferMatrix(n, n);
    p.B = RationalTransferMatrix(n, 1);
    p.C = RationalTransferMatrix(1, n);
    p.D = RationalTransferMatrix(1, 1);
    p.E = RationalTransferMatrix(n, m);
    p.F = RationalTransferMatrix(m, n);
    for (std::size_t i = 0; i < n; ++i)
        p.A(i, i) = lsum[i] * inv_den[i];
    p.B(0, 0) = inv_den[0];
    p.C(0, 0) = RationalFunction::constant(1.0);
    for (std::size_t g = 0; g < m; ++g) {
        const auto [i, j] = out.gain_pairs[g];
        p.E(i, g) = inv_den[i];
        p.F(g, j) = RationalFunction::constant(1.0);
        p.F(g, i) = RationalFunction::constant(-1.0);
    }
    p.bounds.assign(m, lbar);
    return out;
}

}  // namespace posctl
