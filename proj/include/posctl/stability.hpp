#pragma once

// Linear certificates of stability for Metzler (continuous time) and
// nonnegative (discrete time) matrices, plus the diagonal Lyapunov matrix
// assembled from a primal/dual certificate pair.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "lp.hpp"

namespace posctl {

enum class CertificateKind { primal_xi, dual_z, diagonal_P };

enum class Verdict { feasible, infeasible, marginal };

/// Abscissa (or radius minus one) within this band is treated as undecidable.
inline constexpr double kMarginalBand = 1e-7;

struct StabilityCertificate {
    CertificateKind kind = CertificateKind::primal_xi;
    Vector values;  ///< xi, z, or the diagonal of P
    double margin = 0.0;
    TimeDomain domain = TimeDomain::continuous;
};

struct StabilityResult {
    Verdict verdict = Verdict::infeasible;
    std::optional<StabilityCertificate> certificate;
    /// Spectral abscissa (continuous) or spectral radius (discrete) of the input.
    double spectrum = 0.0;

    [[nodiscard]] bool feasible() const noexcept { return verdict == Verdict::feasible; }
};

struct RowCheck {
    std::size_t row = 0;
    double slack = 0.0;
    bool pass = false;
};

struct RowReport {
    std::vector<RowCheck> rows;
    bool pass = false;
};

namespace detail {

// Searches xi > 0 with K xi < 0 and xi <= n, where K = A or B - I.
inline std::optional<StabilityCertificate> search_vector(const Matrix& K, CertificateKind kind, TimeDomain domain) {
    const std::size_t n = K.rows();
    lp::LinearProgram prog;
    prog.M = Matrix(2 * n + n, n);
    prog.b.assign(3 * n, 0.0);
    prog.c.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            prog.M(i, j) = K(i, j);
        prog.strict_rows.push_back(i);
        prog.M(n + i, i) = -1.0;
        prog.strict_rows.push_back(n + i);
        prog.M(2 * n + i, i) = 1.0;
        prog.b[2 * n + i] = static_cast<double>(n);
    }
    const lp::Outcome out = lp::feasibility_with_margin(prog);
    if (!out.optimal())
        return std::nullopt;
    return StabilityCertificate{kind, out.y, out.margin, domain};
}

inline Matrix shifted_for_discrete(const Matrix& B) { return B - Matrix::identity(B.rows()); }

inline void require_square(const Matrix& A, const char* what) {
    if (!A.is_square())
        throw DimensionError(std::string(what) + ": matrix must be square");
}

inline StabilityResult classify(std::optional<StabilityCertificate> cert, double spectrum, double boundary) {
    StabilityResult r;
    r.spectrum = spectrum;
    if (cert) {
        r.verdict = Verdict::feasible;
        r.certificate = std::move(cert);
    } else if (std::abs(spectrum - boundary) <= kMarginalBand) {
        r.verdict = Verdict::marginal;
    } else {
        r.verdict = Verdict::infeasible;
    }
    return r;
}

}  // namespace detail

/// Finds xi > 0 with A xi < 0 for Metzler A.
[[nodiscard]] inline StabilityResult continuous_certificate(const Matrix& A) {
    detail::require_square(A, "continuous_certificate");
    if (!is_metzler(A, 0.0))
        throw StructureError("continuous_certificate: matrix is not Metzler");
    if (A.empty())
        return StabilityResult{Verdict::feasible, StabilityCertificate{CertificateKind::primal_xi, {}, 1.0}, 0.0};
    return detail::classify(detail::search_vector(A, CertificateKind::primal_xi, TimeDomain::continuous),
                            spectral_abscissa(A), 0.0);
}

/// Finds z > 0 with z^T A < 0; solved as the primal problem for A^T.
[[nodiscard]] inline StabilityResult continuous_dual_certificate(const Matrix& A) {
    StabilityResult r = continuous_certificate(A.transpose());
    if (r.certificate)
        r.certificate->kind = CertificateKind::dual_z;
    return r;
}

/// Finds xi > 0 with B xi < xi for nonnegative B.
[[nodiscard]] inline StabilityResult discrete_certificate(const Matrix& B) {
    detail::require_square(B, "discrete_certificate");
    if (!is_nonnegative(B, 0.0))
        throw StructureError("discrete_certificate: matrix has negative entries");
    if (B.empty())
        return StabilityResult{Verdict::feasible,
                               StabilityCertificate{CertificateKind::primal_xi, {}, 1.0, TimeDomain::discrete}, 0.0};
    return detail::classify(
        detail::search_vector(detail::shifted_for_discrete(B), CertificateKind::primal_xi, TimeDomain::discrete),
        spectral_radius(B), 1.0);
}

[[nodiscard]] inline StabilityResult discrete_dual_certificate(const Matrix& B) {
    StabilityResult r = discrete_certificate(B.transpose());
    if (r.certificate)
        r.certificate->kind = CertificateKind::dual_z;
    return r;
}

/// P = diag(z_i / xi_i).
[[nodiscard]] inline StabilityCertificate diagonal_lyapunov(std::span<const double> xi, std::span<const double> z,
                                                            TimeDomain domain = TimeDomain::continuous) {
    if (xi.size() != z.size())
        throw DimensionError("diagonal_lyapunov: xi and z differ in length");
    StabilityCertificate cert{CertificateKind::diagonal_P, Vector(xi.size()), 0.0, domain};
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (!(xi[i] > 0.0) || !(z[i] > 0.0))
            throw StructureError("diagonal_lyapunov: entries must be strictly positive");
        cert.values[i] = z[i] / xi[i];
        smallest = std::min(smallest, cert.values[i]);
    }
    cert.margin = xi.empty() ? 0.0 : smallest;
    return cert;
}

/// Largest eigenvalue of A^T P + P A (continuous) or A^T P A - P (discrete).
[[nodiscard]] inline double lyapunov_residual(const Matrix& A, std::span<const double> p_diag, TimeDomain domain) {
    detail::require_square(A, "lyapunov_residual");
    if (p_diag.size() != A.rows())
        throw DimensionError("lyapunov_residual: P has wrong size");
    const Matrix P = Matrix::diagonal(p_diag);
    Matrix S = domain == TimeDomain::continuous ? Matrix(A.transpose() * P + P * A) : Matrix(A.transpose() * P * A - P);
    // Symmetrize away rounding so the Jacobi solver accepts it.
    S = 0.5 * (S + S.transpose());
    return max_eigenvalue(S);
}

/// Per-row slack of a vector certificate; each row is checkable from local data.
[[nodiscard]] inline RowReport verify_rowwise(const Matrix& A, const StabilityCertificate& cert) {
    detail::require_square(A, "verify_rowwise");
    if (cert.kind == CertificateKind::diagonal_P)
        throw StructureError("verify_rowwise: needs a vector certificate, not a diagonal P");
    if (cert.values.size() != A.rows())
        throw DimensionError("verify_rowwise: certificate length differs from matrix size");
    const Matrix K = cert.kind == CertificateKind::dual_z ? A.transpose() : A;
    const Vector& v = cert.values;
    const Vector Kv = K * v;
    RowReport rep;
    rep.pass = true;
    for (std::size_t i = 0; i < K.rows(); ++i) {
        const double slack = cert.domain == TimeDomain::continuous ? -Kv[i] : v[i] - Kv[i];
        const bool ok = slack > 0.0 && v[i] > 0.0;
        rep.rows.push_back({i, slack, ok});
        rep.pass = rep.pass && ok;
    }
    return rep;
}

}  // namespace posctl
