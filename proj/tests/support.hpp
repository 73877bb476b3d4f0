#pragma once

// Independent numerical oracles (Eigen) and seeded instance generators shared
// by the unit, property and acceptance tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "posctl.hpp"

namespace posctl::testing {

using EMat = Eigen::MatrixXd;
using ECMat = Eigen::MatrixXcd;

inline EMat to_eigen(const Matrix& M) {
    EMat E(M.rows(), M.cols());
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j)
            E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M(i, j);
    return E;
}

inline Matrix from_eigen(const EMat& E) {
    Matrix M(static_cast<std::size_t>(E.rows()), static_cast<std::size_t>(E.cols()));
    for (Eigen::Index i = 0; i < E.rows(); ++i)
        for (Eigen::Index j = 0; j < E.cols(); ++j)
            M(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = E(i, j);
    return M;
}

// ---------------------------------------------------------------------------
// Oracles

inline double oracle_abscissa(const Matrix& A) {
    if (A.rows() == 0)
        return -std::numeric_limits<double>::infinity();
    return Eigen::EigenSolver<EMat>(to_eigen(A), false).eigenvalues().real().maxCoeff();
}

inline double oracle_radius(const Matrix& A) {
    if (A.rows() == 0)
        return 0.0;
    return Eigen::EigenSolver<EMat>(to_eigen(A), false).eigenvalues().cwiseAbs().maxCoeff();
}

inline Eigen::VectorXd oracle_symmetric_eigenvalues(const Matrix& S) {
    return Eigen::SelfAdjointEigenSolver<EMat>(to_eigen(S), Eigen::EigenvaluesOnly).eigenvalues();
}

inline double oracle_lambda_max(const Matrix& S) { return oracle_symmetric_eigenvalues(S).maxCoeff(); }

/// G(z) = D + C (zI - A)^{-1} B for complex z.
inline ECMat oracle_transfer(const PositiveStateSpace& s, std::complex<double> z) {
    const auto n = static_cast<Eigen::Index>(s.states());
    const ECMat A = to_eigen(s.A).cast<std::complex<double>>();
    const ECMat B = to_eigen(s.B).cast<std::complex<double>>();
    const ECMat C = to_eigen(s.C).cast<std::complex<double>>();
    const ECMat D = to_eigen(s.D).cast<std::complex<double>>();
    const ECMat R = (z * ECMat::Identity(n, n) - A).partialPivLu().solve(B);
    return D + C * R;
}

inline double oracle_sigma_max(const ECMat& G) {
    if (G.size() == 0)
        return 0.0;
    return Eigen::JacobiSVD<ECMat>(G).singularValues()(0);
}

/// Supremum of sigma_max(G(iw)) over 0 and a log grid on [1e-4, 1e4].
inline double oracle_grid_hinf(const PositiveStateSpace& s, int points = 2000) {
    double best = oracle_sigma_max(oracle_transfer(s, 0.0));
    for (int k = 0; k < points; ++k) {
        const double w = std::pow(10.0, -4.0 + 8.0 * k / (points - 1));
        best = std::max(best, oracle_sigma_max(oracle_transfer(s, {0.0, w})));
    }
    return best;
}

/// Integral of the impulse response C e^{At} B over [0, T] by composite
/// Simpson with step h, plus D. T is chosen from the slowest mode.
inline EMat oracle_impulse_integral(const PositiveStateSpace& s) {
    const EMat A = to_eigen(s.A), B = to_eigen(s.B), C = to_eigen(s.C), D = to_eigen(s.D);
    const double decay = -oracle_abscissa(s.A);
    const double amax = A.cwiseAbs().maxCoeff();
    const double T = 45.0 / decay;
    int steps = static_cast<int>(std::ceil(T * std::max(amax, 1.0) * 8.0));
    steps += steps % 2;
    const double h = T / steps;
    const EMat step = (A * h).exp();
    EMat E = EMat::Identity(A.rows(), A.cols());
    EMat acc = EMat::Zero(A.rows(), A.cols());
    for (int k = 0; k <= steps; ++k) {
        const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * E;
        E = E * step;
    }
    return C * (acc * (h / 3.0)) * B + D;
}

/// Sum of h_k = C A^k B over k >= 0 (discrete impulse response), plus D.
inline EMat oracle_discrete_impulse_sum(const PositiveStateSpace& s) {
    const EMat A = to_eigen(s.A), B = to_eigen(s.B), C = to_eigen(s.C), D = to_eigen(s.D);
    EMat P = EMat::Identity(A.rows(), A.cols()), acc = EMat::Zero(A.rows(), A.cols());
    for (int k = 0; k < 20000 && P.cwiseAbs().maxCoeff() > 1e-18; ++k) {
        acc += P;
        P = P * A;
    }
    return C * acc * B + D;
}

inline double max_row_sum(const EMat& G) { return G.rows() == 0 ? 0.0 : G.cwiseAbs().rowwise().sum().maxCoeff(); }
inline double max_col_sum(const EMat& G) { return G.cols() == 0 ? 0.0 : G.cwiseAbs().colwise().sum().maxCoeff(); }

/// Evaluates a polynomial given by ascending coefficients at complex s.
inline std::complex<double> poly_at(const std::vector<double>& c, std::complex<double> s) {
    std::complex<double> v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;)
        v = v * s + c[k];
    return v;
}

/// Largest violation max_w |f(iw)| - f(0) over w = 0 and a log grid.
inline double oracle_dominance_violation(const std::vector<double>& num, const std::vector<double>& den,
                                         int points = 2000, double lo = 1e-4, double hi = 1e4) {
    const double f0 = poly_at(num, 0.0).real() / poly_at(den, 0.0).real();
    double worst = -std::abs(f0) - f0;  // |f(0)| - f(0)
    for (int k = 0; k < points; ++k) {
        const double w = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
        const std::complex<double> s{0.0, w};
        worst = std::max(worst, std::abs(poly_at(num, s) / poly_at(den, s)) - f0);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Generators

class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(g_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(g_); }
    bool coin(double p = 0.5) { return uniform() < p; }
    std::mt19937_64& engine() { return g_; }

private:
    std::mt19937_64 g_;
};

/// Sparse random Metzler matrix with diagonal in [-2, 0].
inline Matrix random_metzler(Rng& r, std::size_t n, double density = 0.5) {
    Matrix A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A(i, j) = i == j ? -r.uniform(0.0, 2.0) : (r.coin(density) ? r.uniform(0.0, 1.0) : 0.0);
    return A;
}

/// Metzler matrix whose spectral abscissa is exactly `target` (up to rounding).
inline Matrix metzler_with_abscissa(Rng& r, std::size_t n, double target, double density = 0.5) {
    Matrix A = random_metzler(r, n, density);
    const double shift = oracle_abscissa(A) - target;
    for (std::size_t i = 0; i < n; ++i)
        A(i, i) -= shift;
    return A;
}

inline Matrix random_nonnegative(Rng& r, std::size_t rows, std::size_t cols, double density = 0.6) {
    Matrix M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            M(i, j) = r.coin(density) ? r.uniform(0.0, 1.0) : 0.0;
    return M;
}

/// Stable positive system; continuous abscissa in [-1, -0.1] or discrete
/// radius in [0.1, 0.9].
inline PositiveStateSpace random_positive_system(Rng& r, std::size_t n, std::size_t m, std::size_t q,
                                                 TimeDomain domain) {
    PositiveStateSpace s;
    s.domain = domain;
    if (domain == TimeDomain::continuous) {
        s.A = metzler_with_abscissa(r, n, -r.uniform(0.1, 1.0));
    } else {
        s.A = random_nonnegative(r, n, n);
        const double rho = oracle_radius(s.A);
        const double target = r.uniform(0.1, 0.9);
        s.A = rho > 0.0 ? (target / rho) * s.A : s.A;
    }
    s.B = random_nonnegative(r, n, m, 0.7);
    s.C = random_nonnegative(r, q, n, 0.7);
    s.D = random_nonnegative(r, q, m, 0.3);
    return s;
}

/// Random stable rational function of denominator degree 1..4. Half are
/// products of positive lags (dominated by construction), half have random
/// numerators and possibly lightly damped poles.
struct RandomRational {
    std::vector<double> num, den;
};

inline std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] += a[i] * b[j];
    return c;
}

inline RandomRational random_rational(Rng& r) {
    RandomRational f;
    f.den = {1.0};
    const int deg = r.integer(1, 4);
    int d = 0;
    const bool lags = r.coin();
    while (d < deg) {
        if (!lags && d + 2 <= deg && r.coin()) {
            const double w = r.uniform(0.2, 5.0), zeta = r.uniform(0.05, 1.2);
            f.den = poly_mul(f.den, {w * w, 2.0 * zeta * w, 1.0});
            d += 2;
        } else {
            f.den = poly_mul(f.den, {r.uniform(0.1, 5.0), 1.0});
            d += 1;
        }
    }
    if (lags) {
        f.num = {f.den[0] * r.uniform(0.1, 3.0)};
    } else {
        const int ndeg = r.integer(0, deg);
        f.num.resize(static_cast<std::size_t>(ndeg) + 1);
        for (double& c : f.num)
            c = r.uniform(-1.0, 2.0);
        f.num[0] = std::abs(f.num[0]) + 0.05;  // keep f(0) > 0 so both verdicts occur
    }
    return f;
}

/// Positive lag product k * prod a_i / (s + a_i): dominated.
inline RationalFunction random_dominated(Rng& r, double gain_max = 1.0) {
    const int deg = r.integer(1, 3);
    std::vector<double> den{1.0};
    for (int i = 0; i < deg; ++i)
        den = poly_mul(den, {r.uniform(0.2, 4.0), 1.0});
    return RationalFunction(Polynomial(std::vector<double>{den[0] * r.uniform(0.05, gain_max)}),
                            Polynomial(den));
}

/// Diagonal, strictly feasible PQP test instance: the ball x^T x <= R^2 plus
/// random Metzler constraints slack at a random interior point.
inline PqpInstance random_pqp(Rng& r, std::size_t n, std::size_t extra_constraints, double R = 1.0) {
    auto sym_metzler = [&](double diag_lo, double diag_hi) {
        Matrix M(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            M(i, i) = r.uniform(diag_lo, diag_hi);
            for (std::size_t j = i + 1; j < n; ++j)
                M(i, j) = M(j, i) = r.coin(0.6) ? r.uniform(0.0, 1.0) : 0.0;
        }
        return M;
    };
    PqpInstance p;
    p.M0 = sym_metzler(-1.0, 1.0);
    p.M.push_back(-1.0 * Matrix::identity(n));
    p.b.push_back(-R * R);
    Vector x0(n);
    for (double& v : x0)
        v = r.uniform(0.2, 0.9) * R / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < extra_constraints; ++k) {
        const Matrix M = sym_metzler(-2.0, 0.5);
        p.M.push_back(M);
        p.b.push_back(quadratic_form(M, x0) - r.uniform(0.05, 0.3));
    }
    return p;
}

/// Exhaustive grid maximum of x^T M0 x over x in [0, R]^n with
/// x^T Mk x >= bk - slack.
inline double oracle_pqp_grid(const PqpInstance& p, double R, int per_axis, double slack = 0.0) {
    const std::size_t n = p.size();
    std::vector<int> idx(n, 0);
    Vector x(n);
    double best = -std::numeric_limits<double>::infinity();
    const double h = R / (per_axis - 1);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = idx[i] * h;
        bool ok = true;
        for (std::size_t k = 0; k < p.constraints() && ok; ++k)
            ok = quadratic_form(p.M[k], x) >= p.b[k] - slack;
        if (ok)
            best = std::max(best, quadratic_form(p.M0, x));
        std::size_t i = 0;
        while (i < n && ++idx[i] == per_axis)
            idx[i++] = 0;
        if (i == n)
            break;
    }
    return best;
}

/// Random instance meeting the positive KYP hypotheses: stable A, dense B,
/// Q >= 0 off the last m diagonal entries. Stabilizability of (-A, B) is not
/// guaranteed (A = -cI with m < n is uncontrollable).
inline KypInstance random_kyp(Rng& r, std::size_t n, std::size_t m, TimeDomain domain) {
    KypInstance I;
    I.domain = domain;
    I.A = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            I.A(i, j) = i != j && r.coin() ? r.uniform() : 0.0;
    if (domain == TimeDomain::discrete) {
        // Rescaling a near-nilpotent draw by a huge factor would leave I - A
        // numerically singular; small radii are already Schur.
        const double rho = oracle_radius(I.A);
        if (rho > 0.05)
            I.A = (0.8 * r.uniform() / rho) * I.A;
    } else {
        const double a = oracle_abscissa(I.A);
        for (std::size_t i = 0; i < n; ++i)
            I.A(i, i) -= a + 0.2 + r.uniform();
    }
    I.B = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            I.B(i, j) = r.uniform(0.05, 1.0);
    I.Q = Matrix(n + m, n + m);
    for (std::size_t i = 0; i < n + m; ++i)
        for (std::size_t j = i; j < n + m; ++j)
            I.Q(i, j) = I.Q(j, i) = r.coin() ? 0.3 * r.uniform() : 0.0;
    for (std::size_t j = 0; j < m; ++j)
        I.Q(n + j, n + j) = -3.0 * r.uniform();
    return I;
}

/// Random NSD symmetric Metzler matrix; some are singular (lambda_max = 0).
inline Matrix random_nsd_metzler(Rng& r, std::size_t n, bool singular) {
    Matrix M(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        M(i, i) = r.uniform(-1.0, 1.0);
        for (std::size_t j = i + 1; j < n; ++j)
            M(i, j) = M(j, i) = r.coin(0.4) ? r.uniform(0.1, 1.0) : 0.0;
    }
    const double shift = oracle_lambda_max(M) + (singular ? 0.0 : r.uniform(0.01, 0.5));
    for (std::size_t i = 0; i < n; ++i)
        M(i, i) -= shift;
    return M;
}

}  // namespace posctl::testing
