#include <gtest/gtest.h>

#include "support.hpp"

using namespace posctl;
using namespace posctl::testing;

namespace {
const Vector kReferenceXi{0.5, 0.5, 1.69, 0.87};
}

TEST(ContinuousCertificate, Examples) {
    const StabilityResult a = continuous_certificate(-1.0 * Matrix::identity(3));
    ASSERT_TRUE(a.feasible());
    for (double v : a.certificate->values)
        EXPECT_GT(v, 0.0);

    const Matrix A = demos::transport_matrix();
    const StabilityResult b = continuous_certificate(A);
    ASSERT_TRUE(b.feasible());
    EXPECT_TRUE(verify_rowwise(A, *b.certificate).pass);

    EXPECT_EQ(continuous_certificate(Matrix{{0, 1}, {1, 0}}).verdict, Verdict::infeasible);
    EXPECT_THROW((void)continuous_certificate(Matrix{{-1, -1}, {0, -1}}), StructureError);
}

TEST(ContinuousCertificate, MarginalIsReported) {
    EXPECT_EQ(continuous_certificate(Matrix{{-1, 1}, {1, -1}}).verdict, Verdict::marginal);
}

TEST(DualCertificate, Examples) {
    const StabilityResult a = continuous_dual_certificate(Matrix{{-1, 0}, {0, -4}});
    ASSERT_TRUE(a.feasible());
    const Vector zA = Matrix{{-1, 0}, {0, -4}}.transpose() * a.certificate->values;
    EXPECT_LT(zA[0], 0.0);
    EXPECT_LT(zA[1], 0.0);

    Rng r(31);
    const Matrix A = metzler_with_abscissa(r, 6, -0.3);
    const StabilityResult d = continuous_dual_certificate(A);
    ASSERT_TRUE(d.feasible());
    const Vector row = A.transpose() * d.certificate->values;
    for (double v : row)
        EXPECT_LT(v, 0.0);
}

TEST(DiagonalLyapunov, Formula) {
    const StabilityCertificate P = diagonal_lyapunov(Vector{1, 1}, Vector{1, 1});
    EXPECT_EQ(P.values, (Vector{1, 1}));
    const StabilityCertificate Q = diagonal_lyapunov(Vector{1, 2}, Vector{2, 1});
    EXPECT_DOUBLE_EQ(Q.values[0], 2.0);
    EXPECT_DOUBLE_EQ(Q.values[1], 0.5);
    EXPECT_THROW((void)diagonal_lyapunov(Vector{1, 0}, Vector{1, 1}), StructureError);
    EXPECT_THROW((void)diagonal_lyapunov(Vector{1}, Vector{1, 1}), DimensionError);
}

TEST(DiagonalLyapunov, TransportWithReferenceXi) {
    const Matrix A = demos::transport_matrix();
    const StabilityResult z = continuous_dual_certificate(A);
    ASSERT_TRUE(z.feasible());
    const StabilityCertificate P = diagonal_lyapunov(kReferenceXi, z.certificate->values);
    const Matrix Pm = Matrix::diagonal(P.values);
    EXPECT_LT(oracle_lambda_max(A.transpose() * Pm + Pm * A), 0.0);
}

TEST(DiscreteCertificate, Examples) {
    EXPECT_TRUE(discrete_certificate(Matrix(3, 3)).feasible());
    EXPECT_NE(discrete_certificate(Matrix::identity(2)).verdict, Verdict::feasible);
    Rng r(32);
    Matrix B = random_nonnegative(r, 5, 5, 0.8);
    for (std::size_t i = 0; i < 5; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 5; ++j)
            s += B(i, j);
        for (std::size_t j = 0; j < 5; ++j)
            B(i, j) = s > 0 ? 0.9 * B(i, j) / s : 0.0;
    }
    ASSERT_LT(oracle_radius(B), 1.0);
    const StabilityResult d = discrete_certificate(B);
    ASSERT_TRUE(d.feasible());
    EXPECT_TRUE(verify_rowwise(B, *d.certificate).pass);
    EXPECT_THROW((void)discrete_certificate(Matrix{{0.1, -0.1}, {0, 0}}), StructureError);
}

TEST(VerifyRowwise, Examples) {
    const StabilityCertificate one{CertificateKind::primal_xi, {1, 1}, 0.0, TimeDomain::continuous};
    const RowReport a = verify_rowwise(-1.0 * Matrix::identity(2), one);
    EXPECT_TRUE(a.pass);
    EXPECT_DOUBLE_EQ(a.rows[0].slack, 1.0);
    EXPECT_DOUBLE_EQ(a.rows[1].slack, 1.0);

    const Matrix A = demos::transport_matrix();
    const RowReport b = verify_rowwise(A, {CertificateKind::primal_xi, kReferenceXi, 0.0, TimeDomain::continuous});
    EXPECT_TRUE(b.pass);
    const double expected[4] = {1.0, 1.0, 1.01, 0.97};
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_NEAR(b.rows[i].slack, expected[i], 1e-12);

    const RowReport c = verify_rowwise(A, {CertificateKind::primal_xi, {1, 1, 1, 1}, 0.0, TimeDomain::continuous});
    EXPECT_FALSE(c.pass);
    EXPECT_FALSE(c.rows[2].pass);

    EXPECT_THROW((void)verify_rowwise(A, {CertificateKind::diagonal_P, kReferenceXi, 0.0, TimeDomain::continuous}),
                 StructureError);
}

TEST(StabilityProperty, ContinuousEquivalences) {
    Rng r(33);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = static_cast<std::size_t>(r.integer(1, 8));
        const Matrix A = metzler_with_abscissa(r, n, r.uniform(-1.0, 0.5));
        const double alpha = oracle_abscissa(A);
        if (std::abs(alpha) <= kMarginalBand)
            continue;
        const StabilityResult p = continuous_certificate(A), d = continuous_dual_certificate(A);
        EXPECT_EQ(p.feasible(), alpha < 0) << "trial " << t;
        EXPECT_EQ(d.feasible(), alpha < 0) << "trial " << t;
        EXPECT_EQ(nonneg_inverse_check(A), alpha < 0) << "trial " << t;
        if (p.feasible() && d.feasible()) {
            const StabilityCertificate P = diagonal_lyapunov(p.certificate->values, d.certificate->values);
            EXPECT_LT(lyapunov_residual(A, P.values, TimeDomain::continuous), 0.0);
            const Matrix Pm = Matrix::diagonal(P.values);
            EXPECT_LT(oracle_lambda_max(A.transpose() * Pm + Pm * A), 0.0);
            // Scale invariance of the row test.
            StabilityCertificate scaled = *p.certificate;
            for (double& v : scaled.values)
                v *= 37.5;
            EXPECT_TRUE(verify_rowwise(A, scaled).pass);
        }
    }
}

TEST(StabilityProperty, DiscreteEquivalences) {
    Rng r(34);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = static_cast<std::size_t>(r.integer(1, 8));
        Matrix B = random_nonnegative(r, n, n);
        const double rho0 = oracle_radius(B);
        if (rho0 > 0)
            B = (r.uniform(0.2, 1.5) / rho0) * B;
        const double rho = oracle_radius(B);
        if (std::abs(rho - 1.0) <= kMarginalBand)
            continue;
        const StabilityResult p = discrete_certificate(B), d = discrete_dual_certificate(B);
        EXPECT_EQ(p.feasible(), rho < 1.0) << "trial " << t;
        EXPECT_EQ(d.feasible(), rho < 1.0) << "trial " << t;
        if (p.feasible() && d.feasible()) {
            const StabilityCertificate P =
                diagonal_lyapunov(p.certificate->values, d.certificate->values, TimeDomain::discrete);
            const Matrix Pm = Matrix::diagonal(P.values);
            EXPECT_LT(oracle_lambda_max(B.transpose() * Pm * B - Pm), 0.0);
        }
    }
}
