#pragma once

// Induced gains of positive systems. For these systems every studied induced
// norm is a norm of the static gain G(0), and the linear certificates below
// prove strict upper bounds on the 1- and infinity-induced gains.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "error.hpp"
#include "linalg.hpp"
#include "lp.hpp"
#include "stability.hpp"

namespace posctl {

struct PositiveStateSpace {
    Matrix A, B, C, D;
    TimeDomain domain = TimeDomain::continuous;

    [[nodiscard]] std::size_t states() const noexcept { return A.rows(); }
    [[nodiscard]] std::size_t inputs() const noexcept { return D.cols(); }
    [[nodiscard]] std::size_t outputs() const noexcept { return D.rows(); }

    /// Throws on inconsistent dimensions or a violated sign structure.
    void validate(double tol = kDefaultTol) const {
        const std::size_t n = A.rows();
        if (!A.is_square())
            throw DimensionError("state space: A must be square");
        if (B.rows() != n || C.cols() != n || D.rows() != C.rows() || D.cols() != B.cols())
            throw DimensionError("state space: inconsistent dimensions of A, B, C, D");
        const bool a_ok = domain == TimeDomain::continuous ? is_metzler(A, tol) : is_nonnegative(A, tol);
        if (!a_ok)
            throw StructureError(domain == TimeDomain::continuous ? "state space: A is not Metzler"
                                                                  : "state space: A has negative entries");
        if (!is_nonnegative(B, tol) || !is_nonnegative(C, tol) || !is_nonnegative(D, tol))
            throw StructureError("state space: B, C, D must be nonnegative");
    }

    /// Mirror system (A^T, C^T, B^T, D^T); swaps the 1- and infinity-induced gains.
    [[nodiscard]] PositiveStateSpace transposed() const {
        return {A.transpose(), C.transpose(), B.transpose(), D.transpose(), domain};
    }
};

[[nodiscard]] inline bool is_stable(const PositiveStateSpace& sys) {
    if (sys.states() == 0)
        return true;
    return sys.domain == TimeDomain::continuous ? spectral_abscissa(sys.A) < 0.0 : spectral_radius(sys.A) < 1.0;
}

/// D - C A^{-1} B (continuous) or D + C (I - A)^{-1} B (discrete).
[[nodiscard]] inline Matrix static_gain(const PositiveStateSpace& sys) {
    sys.validate();
    if (!is_stable(sys))
        throw StructureError("static_gain: system is not stable");
    if (sys.states() == 0)
        return sys.D;
    if (sys.domain == TimeDomain::continuous)
        return sys.D - sys.C * solve(sys.A, sys.B);
    return sys.D + sys.C * solve(Matrix::identity(sys.states()) - sys.A, sys.B);
}

/// Induced norm of a fixed matrix for p in {1, 2, inf}.
[[nodiscard]] inline double matrix_norm(const Matrix& G, double p) {
    if (G.empty())
        return 0.0;
    if (p == 1.0)
        return norm_inf(G.transpose());
    if (std::isinf(p) && p > 0)
        return norm_inf(G);
    if (p == 2.0) {
        Matrix GtG = G.transpose() * G;
        GtG = 0.5 * (GtG + GtG.transpose());
        return std::sqrt(std::max(0.0, max_eigenvalue(GtG)));
    }
    throw std::invalid_argument("matrix_norm: p must be 1, 2 or infinity");
}

/// p-induced gain of the convolution operator, read off the static gain.
/// Scalar systems accept any p >= 1.
[[nodiscard]] inline double induced_norm(const PositiveStateSpace& sys, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("induced_norm: p must be >= 1");
    const Matrix G = static_gain(sys);
    if (G.rows() == 1 && G.cols() == 1)
        return G(0, 0);
    return matrix_norm(G, p);
}

enum class Direction { linf, l1 };

struct PerformanceCertificate {
    Direction direction = Direction::linf;
    Vector vector;  ///< xi for linf, p for l1
    double gamma = 0.0;
    double margin = 0.0;
    TimeDomain domain = TimeDomain::continuous;
};

namespace detail {

// Strict rows A xi + B1 < (0 | xi) and C xi + D1 < gamma 1 over xi >= 0.
inline std::optional<PerformanceCertificate> linf_search(const PositiveStateSpace& sys, double gamma,
                                                         Direction tag) {
    const std::size_t n = sys.states(), m = sys.inputs(), q = sys.outputs();
    const bool discrete = sys.domain == TimeDomain::discrete;
    lp::LinearProgram prog;
    prog.M = Matrix(n + q, n);
    prog.b.assign(n + q, 0.0);
    prog.c.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double bsum = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            bsum += sys.B(i, j);
        for (std::size_t j = 0; j < n; ++j)
            prog.M(i, j) = sys.A(i, j) - (discrete && i == j ? 1.0 : 0.0);
        prog.b[i] = -bsum;
        prog.strict_rows.push_back(i);
    }
    for (std::size_t i = 0; i < q; ++i) {
        double dsum = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            dsum += sys.D(i, j);
        for (std::size_t j = 0; j < n; ++j)
            prog.M(n + i, j) = sys.C(i, j);
        prog.b[n + i] = gamma - dsum;
        prog.strict_rows.push_back(n + i);
    }
    const lp::Outcome out = lp::feasibility_with_margin(prog);
    if (!out.optimal())
        return std::nullopt;
    return PerformanceCertificate{tag, out.y, gamma, out.margin, sys.domain};
}

inline void require_positive_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("certificate: gamma must be a positive finite number");
}

}  // namespace detail

/// xi >= 0 proving the infinity-induced gain is strictly below gamma.
[[nodiscard]] inline std::optional<PerformanceCertificate> linf_certificate(const PositiveStateSpace& sys,
                                                                           double gamma) {
    detail::require_positive_gamma(gamma);
    sys.validate();
    return detail::linf_search(sys, gamma, Direction::linf);
}

/// p >= 0 proving the 1-induced gain is strictly below gamma.
[[nodiscard]] inline std::optional<PerformanceCertificate> l1_certificate(const PositiveStateSpace& sys, double gamma) {
    detail::require_positive_gamma(gamma);
    sys.validate();
    return detail::linf_search(sys.transposed(), gamma, Direction::l1);
}

[[nodiscard]] inline std::optional<PerformanceCertificate> performance_certificate(const PositiveStateSpace& sys,
                                                                                  Direction dir, double gamma) {
    return dir == Direction::linf ? linf_certificate(sys, gamma) : l1_certificate(sys, gamma);
}

/// Row slacks of a performance certificate against the given system.
[[nodiscard]] inline RowReport certificate_rows(const PositiveStateSpace& sys, const PerformanceCertificate& cert) {
    const PositiveStateSpace s = cert.direction == Direction::linf ? sys : sys.transposed();
    const std::size_t n = s.states(), q = s.outputs();
    if (cert.vector.size() != n)
        throw DimensionError("certificate_rows: certificate length differs from state dimension");
    const Vector Ax = s.A * cert.vector, Cx = s.C * cert.vector;
    const Vector b1 = s.B * ones(s.inputs()), d1 = s.D * ones(s.inputs());
    RowReport rep;
    rep.pass = is_nonnegative(cert.vector, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double rhs = s.domain == TimeDomain::discrete ? cert.vector[i] : 0.0;
        const double slack = rhs - Ax[i] - b1[i];
        rep.rows.push_back({i, slack, slack > 0.0});
        rep.pass = rep.pass && slack > 0.0;
    }
    for (std::size_t i = 0; i < q; ++i) {
        const double slack = cert.gamma - Cx[i] - d1[i];
        rep.rows.push_back({n + i, slack, slack > 0.0});
        rep.pass = rep.pass && slack > 0.0;
    }
    return rep;
}

struct SimulationOptions {
    double horizon = 20.0;
    double step = 0.0;        ///< 0 selects 0.1 / max|a_ii|
    int random_trials = 50;
    std::uint64_t seed = 1;
};

/// Simulates x' = Ax + Bw (or x+ = Ax + Bw) from x(0) = 0 under |w| <= 1 and
/// reports whether -xi < x(t) < xi held throughout. Inputs are w = +1, w = -1
/// and seeded random sign-switching signals.
[[nodiscard]] inline bool state_bound_simulation(const PositiveStateSpace& sys, std::span<const double> xi,
                                                 const SimulationOptions& opt = {}) {
    sys.validate();
    const std::size_t n = sys.states(), m = sys.inputs();
    if (xi.size() != n)
        throw DimensionError("state_bound_simulation: xi has wrong length");
    const bool discrete = sys.domain == TimeDomain::discrete;
    double h = 1.0;
    std::size_t steps = static_cast<std::size_t>(std::max(0.0, opt.horizon));
    if (!discrete) {
        double amax = 0.0;
        for (double d : sys.A.diag())
            amax = std::max(amax, std::abs(d));
        const double limit = amax > 0.0 ? 1.0 / amax : std::numeric_limits<double>::infinity();
        h = opt.step > 0.0 ? opt.step : (amax > 0.0 ? 0.1 / amax : 0.1);
        if (h > limit)
            throw std::invalid_argument("state_bound_simulation: step exceeds the positivity limit 1/max|a_ii|");
        steps = static_cast<std::size_t>(std::ceil(opt.horizon / h));
    }

    auto run = [&](auto&& input_at) {
        Vector x(n, 0.0), w(m);
        for (std::size_t k = 0; k < steps; ++k) {
            input_at(k, w);
            const Vector Ax = sys.A * x, Bw = sys.B * w;
            for (std::size_t i = 0; i < n; ++i)
                x[i] = discrete ? Ax[i] + Bw[i] : x[i] + h * (Ax[i] + Bw[i]);
            for (std::size_t i = 0; i < n; ++i)
                if (!(std::abs(x[i]) < xi[i]))
                    return false;
        }
        return true;
    };

    for (double level : {1.0, -1.0})
        if (!run([level](std::size_t, Vector& w) { std::fill(w.begin(), w.end(), level); }))
            return false;

    std::mt19937_64 rng(opt.seed);
    std::bernoulli_distribution coin(0.5);
    const double switch_prob = discrete ? 0.2 : std::min(1.0, h);
    std::bernoulli_distribution flip(switch_prob);
    for (int trial = 0; trial < opt.random_trials; ++trial) {
        Vector sign(m);
        for (double& s : sign)
            s = coin(rng) ? 1.0 : -1.0;
        const bool ok = run([&](std::size_t, Vector& w) {
            for (std::size_t j = 0; j < m; ++j) {
                if (flip(rng))
                    sign[j] = -sign[j];
                w[j] = sign[j];
            }
        });
        if (!ok)
            return false;
    }
    return true;
}

}  // namespace posctl
