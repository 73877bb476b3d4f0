#include <gtest/gtest.h>

#include "support.hpp"

using namespace posctl;
using namespace posctl::testing;

TEST(IsMetzler, SignPatterns) {
    EXPECT_TRUE(is_metzler(Matrix{{-1, 2}, {0, -3}}));
    EXPECT_FALSE(is_metzler(Matrix{{-1, -0.1}, {0, -1}}));
    EXPECT_TRUE(is_metzler(demos::transport_matrix()));
    EXPECT_TRUE(is_metzler(Matrix{{-1, -1e-10}, {0, -1}}, 1e-9));
    EXPECT_THROW((void)is_metzler(Matrix(2, 3)), DimensionError);
}

TEST(SpectralAbscissa, SmallCases) {
    EXPECT_NEAR(spectral_abscissa(-1.0 * Matrix::identity(2)), -1.0, 1e-12);
    EXPECT_NEAR(spectral_abscissa(Matrix{{0, 1}, {1, 0}}), 1.0, 1e-12);
    EXPECT_THROW((void)spectral_abscissa(Matrix{{-1, -1}, {0, -1}}), StructureError);
}

TEST(SpectralAbscissa, TransportClosedLoopIsStable) {
    const Matrix A = demos::transport_matrix({1, 0, 2, 1, 1, 2});
    const double a = spectral_abscissa(A);
    EXPECT_LT(a, 0.0);
    EXPECT_NEAR(a, oracle_abscissa(A), 1e-9);
}

TEST(SpectralRadius, SmallCases) {
    EXPECT_NEAR(spectral_radius(Matrix(3, 3)), 0.0, 1e-15);
    EXPECT_NEAR(spectral_radius(Matrix{{0.5, 0}, {0, 0.25}}), 0.5, 1e-12);
    EXPECT_THROW((void)spectral_radius(Matrix{{0.5, -0.1}, {0, 0.25}}), StructureError);
}

TEST(SpectralRadius, RandomNonnegativeMatchesEigen) {
    Rng r(11);
    for (int t = 0; t < 50; ++t) {
        const Matrix B = random_nonnegative(r, 5, 5);
        EXPECT_NEAR(spectral_radius(B), oracle_radius(B), 1e-9) << "trial " << t;
    }
}

TEST(SymmetricEigenvalues, SmallCases) {
    const Vector e = symmetric_eigenvalues(Matrix::identity(3));
    for (double v : e)
        EXPECT_NEAR(v, 1.0, 1e-14);
    const Vector f = symmetric_eigenvalues(Matrix{{0, 1}, {1, 0}});
    EXPECT_NEAR(f[0], -1.0, 1e-14);
    EXPECT_NEAR(f[1], 1.0, 1e-14);
    EXPECT_THROW((void)symmetric_eigenvalues(Matrix{{0, 1}, {0.5, 0}}), StructureError);
}

TEST(SymmetricEigenvalues, MatchCharacteristicPolynomialRoots) {
    Rng r(12);
    for (int t = 0; t < 20; ++t) {
        Matrix S(6, 6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = i; j < 6; ++j)
                S(i, j) = S(j, i) = r.uniform(-1, 1);
        // Companion matrix of det(sI - S), coefficients from Eigen's
        // eigenvalue-free Hessenberg-free route: Faddeev-LeVerrier.
        const EMat E = to_eigen(S);
        std::vector<double> c(7, 0.0);
        c[6] = 1.0;
        EMat Mk = EMat::Zero(6, 6);
        for (int k = 1; k <= 6; ++k) {
            Mk = E * Mk + c[7 - k] * EMat::Identity(6, 6);
            c[6 - k] = -(E * Mk).trace() / k;
        }
        EMat comp = EMat::Zero(6, 6);
        for (int i = 1; i < 6; ++i)
            comp(i, i - 1) = 1.0;
        for (int i = 0; i < 6; ++i)
            comp(i, 5) = -c[static_cast<std::size_t>(i)];
        Eigen::VectorXd roots = Eigen::EigenSolver<EMat>(comp, false).eigenvalues().real();
        std::sort(roots.data(), roots.data() + roots.size());
        const Vector ours = symmetric_eigenvalues(S);
        for (int i = 0; i < 6; ++i)
            EXPECT_NEAR(ours[static_cast<std::size_t>(i)], roots(i), 1e-8) << "trial " << t;
    }
}

TEST(SymmetricEigen, Reconstruction) {
    Rng r(13);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = static_cast<std::size_t>(r.integer(1, 8));
        Matrix S(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                S(i, j) = S(j, i) = r.uniform(-2, 2);
        const SymmetricEigen e = symmetric_eigen(S);
        const Matrix R = e.vectors * Matrix::diagonal(e.values) * e.vectors.transpose();
        EXPECT_LE(norm_inf(R - S), 1e-9);
        EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    }
}

TEST(NonnegInverseCheck, Examples) {
    EXPECT_TRUE(nonneg_inverse_check(-1.0 * Matrix::identity(2)));
    EXPECT_FALSE(nonneg_inverse_check(Matrix{{1}}));
    EXPECT_TRUE(nonneg_inverse_check(demos::transport_matrix()));
    EXPECT_TRUE(nonneg_inverse_check(Matrix{{0.5, 0}, {0.2, 0.3}}, TimeDomain::discrete));
    EXPECT_FALSE(nonneg_inverse_check(Matrix{{1.5}}, TimeDomain::discrete));
    EXPECT_THROW((void)nonneg_inverse_check(Matrix{{0, 0}, {0, -1}}), NumericalError);
}

TEST(NonnegInverseCheck, TransportInverseAgreesWithLu) {
    const Matrix A = demos::transport_matrix();
    const EMat inv = -to_eigen(A).inverse();
    EXPECT_GE(inv.minCoeff(), -1e-12);
}

// Proposition-1 style equivalences on a mixed corpus.
TEST(LinalgProperty, AbscissaAndInverseCheckAgreeWithEigen) {
    Rng r(14);
    int stable = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = static_cast<std::size_t>(r.integer(1, 8));
        const Matrix A = metzler_with_abscissa(r, n, r.uniform(-1.0, 0.5));
        const double ours = spectral_abscissa(A), oracle = oracle_abscissa(A);
        ASSERT_NEAR(ours, oracle, 1e-8) << "trial " << t;
        if (std::abs(oracle) <= 1e-7)
            continue;
        const bool inv = std::abs(oracle) > 1e-9 && nonneg_inverse_check(A);
        EXPECT_EQ(inv, oracle < 0.0) << "trial " << t;
        stable += oracle < 0.0;
    }
    EXPECT_GT(stable, 50);
    EXPECT_LT(stable, 190);
}

TEST(Lu, SolveMatchesEigen) {
    Rng r(15);
    for (int t = 0; t < 20; ++t) {
        Matrix A(5, 5);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                A(i, j) = r.uniform(-1, 1);
        Vector b(5);
        for (double& v : b)
            v = r.uniform(-1, 1);
        const Vector x = solve(A, b);
        const Eigen::VectorXd xo = to_eigen(A).partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), 5));
        for (int i = 0; i < 5; ++i)
            EXPECT_NEAR(x[static_cast<std::size_t>(i)], xo(i), 1e-9);
    }
}
