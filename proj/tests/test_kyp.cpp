#include <gtest/gtest.h>

#include "support.hpp"

using namespace posctl;
using namespace posctl::testing;

namespace {

KypInstance scalar(double a, double b, Matrix Q, TimeDomain d = TimeDomain::continuous) {
    return KypInstance{Matrix{{a}}, Matrix{{b}}, std::move(Q), d};
}

KypInstance counterexample() { return scalar(-1.0, 0.0, Matrix{{0.0, 1.0}, {1.0, 0.0}}); }

// Frequency form evaluated independently with Eigen at one point z.
double oracle_frequency_lambda(const KypInstance& k, std::complex<double> z) {
    const auto n = static_cast<Eigen::Index>(k.states()), m = static_cast<Eigen::Index>(k.inputs());
    const ECMat R = (z * ECMat::Identity(n, n) - to_eigen(k.A).cast<std::complex<double>>())
                        .partialPivLu()
                        .solve(to_eigen(k.B).cast<std::complex<double>>());
    ECMat T(n + m, m);
    T << R, ECMat::Identity(m, m);
    const ECMat H = T.adjoint() * to_eigen(k.Q).cast<std::complex<double>>() * T;
    return Eigen::SelfAdjointEigenSolver<ECMat>(0.5 * (H + H.adjoint())).eigenvalues().maxCoeff();
}

}  // namespace

TEST(KypStatic, Examples) {
    EXPECT_TRUE(kyp_static(counterexample()));
    EXPECT_NEAR(kyp_static_lambda(counterexample()), 0.0, 1e-12);
    EXPECT_TRUE(kyp_static(scalar(-1.0, 1.0, Matrix{{0.0, 0.0}, {0.0, -1.0}})));
    EXPECT_NEAR(kyp_static_lambda(scalar(-1.0, 1.0, Matrix{{0.0, 0.0}, {0.0, -1.0}})), -1.0, 1e-12);
    EXPECT_THROW((void)kyp_static(scalar(0.0, 1.0, Matrix{{0.0, 0.0}, {0.0, -1.0}})), NumericalError);
    EXPECT_THROW((void)kyp_static(scalar(1.0, 1.0, Matrix{{0.0, 0.0}, {0.0, -1.0}}, TimeDomain::discrete)),
                 NumericalError);
}

TEST(KypFrequency, ScalarGainBounds) {
    const Vector grid = default_frequency_grid(TimeDomain::continuous);
    EXPECT_TRUE(kyp_frequency(counterexample(), grid));
    // |1/(iw+1)| <= gamma encoded by Q = diag(1, -gamma^2).
    EXPECT_TRUE(kyp_frequency(scalar(-1.0, 1.0, Matrix{{1.0, 0.0}, {0.0, -4.0}}), grid));
    EXPECT_FALSE(kyp_frequency(scalar(-1.0, 1.0, Matrix{{1.0, 0.0}, {0.0, -0.25}}), grid));
    EXPECT_THROW((void)kyp_frequency(counterexample(), Vector{}), std::invalid_argument);
}

TEST(KypFrequency, MatchesEigenOracle) {
    Rng r(81);
    for (int t = 0; t < 20; ++t) {
        const auto dom = t % 2 ? TimeDomain::discrete : TimeDomain::continuous;
        const KypInstance k = random_kyp(r, static_cast<std::size_t>(r.integer(1, 4)),
                                         static_cast<std::size_t>(r.integer(1, 2)), dom);
        for (double w : {0.0, 0.3, 1.7}) {
            const std::complex<double> z = dom == TimeDomain::continuous ? std::complex<double>{0.0, w}
                                                                         : std::polar(1.0, w);
            EXPECT_NEAR(detail::frequency_lambda(k, z), oracle_frequency_lambda(k, z), 1e-9) << t;
        }
        // Zero frequency coincides with the static condition.
        EXPECT_NEAR(kyp_frequency_lambda(k, Vector{0.0}), kyp_static_lambda(k), 1e-9) << t;
    }
}

TEST(KypLp, WitnessVerifies) {
    const KypInstance k = scalar(-1.0, 1.0, Matrix{{0.0, 0.0}, {0.0, -1.0}});
    EXPECT_LE(kyp_lp_violation(k, KypLpWitness{{1.0}, {1.0}, {1.0}}), 1e-12);
    const auto w = kyp_lp_certificate(k);
    ASSERT_TRUE(w.has_value());
    EXPECT_LE(kyp_lp_violation(k, *w), 1e-8);
    // The counterexample: (4) still matches (2).
    EXPECT_EQ(kyp_lp_certificate(counterexample()).has_value(), kyp_static(counterexample()));
}

TEST(KypDiagonalP, Examples) {
    const KypInstance k = scalar(-1.0, 1.0, Matrix{{1.0, 0.0}, {0.0, -4.0}});
    // [[-2p+1, p], [p, -4]] <= 0 iff p^2 - 8p + 4 <= 0, i.e. p in [4 - sqrt 12, 4 + sqrt 12].
    EXPECT_GT(kyp_lmi_lambda(k, Vector{0.5}), 0.0);
    EXPECT_LE(kyp_lmi_lambda(k, Vector{1.0}), 0.0);
    EXPECT_LE(kyp_lmi_lambda(k, Vector{4.0 - std::sqrt(12.0) + 1e-6}), 0.0);
    EXPECT_GT(kyp_lmi_lambda(k, Vector{4.0 - std::sqrt(12.0) - 1e-6}), 0.0);
    const DiagonalPResult res = kyp_diagonal_P(k);
    ASSERT_EQ(res.status, Condition::holds);
    EXPECT_GE(res.P[0], 4.0 - std::sqrt(12.0) - 1e-6);
    EXPECT_LE(res.P[0], 4.0 + std::sqrt(12.0) + 1e-6);
    EXPECT_LE(kyp_lmi_lambda(k, res.P), 1e-8);

    const KypInstance neg = scalar(-1.0, 1.0, Matrix{{-1.0, 0.0}, {0.0, -1.0}});
    const DiagonalPResult zero = kyp_diagonal_P(neg);
    ASSERT_EQ(zero.status, Condition::holds);
    EXPECT_EQ(zero.P, Vector{0.0});
}

TEST(KypCounterexample, ExactSplit) {
    const KypVerdict v = kyp_verdict(counterexample());
    EXPECT_EQ(v.cond1, Condition::holds);
    EXPECT_EQ(v.cond2, Condition::holds);
    EXPECT_EQ(v.cond3, Condition::fails);
    EXPECT_EQ(v.cond4, Condition::holds);
    EXPECT_FALSE(v.stabilizable);
    EXPECT_FALSE(v.P.has_value());
    EXPECT_TRUE(v.lp_witness.has_value());
    // Every p >= 0 leaves [[-2p, 1], [1, 0]] with a positive eigenvalue.
    for (double p : {0.0, 0.5, 1.0, 10.0, 1e4})
        EXPECT_GT(kyp_lmi_lambda(counterexample(), Vector{p}), 0.0);
}

TEST(KypBilinear, Examples) {
    const BilinearTransform t = bilinear_transform(
        KypInstance{Matrix{{0.0}}, Matrix{{1.0}}, Matrix{{0.0, 0.0}, {0.0, -1.0}}, TimeDomain::discrete});
    EXPECT_NEAR(t.continuous.A(0, 0), -1.0, 1e-15);
    EXPECT_NEAR(t.continuous.B(0, 0), 2.0, 1e-15);
    EXPECT_EQ(t.continuous.domain, TimeDomain::continuous);

    KypInstance d;
    d.A = Matrix{{0.5, 0.0}, {0.0, 0.2}};
    d.B = Matrix{{1.0}, {1.0}};
    d.Q = Matrix(3, 3);
    d.domain = TimeDomain::discrete;
    const BilinearTransform u = bilinear_transform(d);
    EXPECT_NEAR(u.continuous.A(0, 0), -1.0 / 3.0, 1e-15);
    EXPECT_NEAR(u.continuous.A(1, 1), -2.0 / 3.0, 1e-15);
    EXPECT_NEAR(u.continuous.A(0, 1), 0.0, 1e-15);
    EXPECT_THROW((void)bilinear_transform(counterexample()), std::invalid_argument);
}

TEST(KypProperty, FourWayAgreement) {
    Rng r(82);
    int disagreements = 0, holds = 0, checked = 0;
    for (int t = 0; checked < 100; ++t) {
        ASSERT_LT(t, 1000);
        const auto dom = t % 2 ? TimeDomain::discrete : TimeDomain::continuous;
        const KypInstance k = random_kyp(r, static_cast<std::size_t>(r.integer(1, 5)),
                                         static_cast<std::size_t>(r.integer(1, 3)), dom);
        // The theorem needs stabilizability and, for a finite search, strict margins.
        if (!kyp_stabilizable(k) || std::abs(kyp_static_lambda(k)) < 1e-6)
            continue;
        ++checked;
        const KypVerdict v = kyp_verdict(k);
        disagreements += !v.all_agree();
        holds += v.cond2 == Condition::holds;
        if (v.P) {
            EXPECT_LE(kyp_lmi_lambda(k, *v.P), 1e-8);
        }
        if (v.lp_witness) {
            EXPECT_LE(kyp_lp_violation(k, *v.lp_witness), 1e-8);
        }
    }
    EXPECT_EQ(disagreements, 0);
    EXPECT_GT(holds, 10);
    EXPECT_LT(holds, 90);
}

TEST(KypProperty, TransformMatchesDirectDiscrete) {
    Rng r(83);
    for (int t = 0; t < 50; ++t) {
        const KypInstance k = random_kyp(r, static_cast<std::size_t>(r.integer(1, 4)),
                                         static_cast<std::size_t>(r.integer(1, 2)), TimeDomain::discrete);
        if (std::abs(kyp_static_lambda(k)) < 1e-6)
            continue;
        const KypVerdict direct = kyp_verdict(k);
        const KypVerdict via = kyp_conditions_via_transform(k);
        EXPECT_EQ(direct.cond1, via.cond1) << t;
        EXPECT_EQ(direct.cond2, via.cond2) << t;
        EXPECT_EQ(direct.cond3, via.cond3) << t;
        EXPECT_EQ(direct.cond4, via.cond4) << t;
        if (via.P) {
            EXPECT_LE(kyp_lmi_lambda(k, *via.P), 1e-8) << t;
        }
    }
}

TEST(KypProperty, StaticImpliesFrequency) {
    Rng r(84);
    for (int t = 0; t < 60; ++t) {
        const auto dom = t % 2 ? TimeDomain::discrete : TimeDomain::continuous;
        const KypInstance k = random_kyp(r, static_cast<std::size_t>(r.integer(1, 5)),
                                         static_cast<std::size_t>(r.integer(1, 3)), dom);
        if (kyp_static(k)) {
            EXPECT_TRUE(kyp_frequency(k, default_frequency_grid(dom))) << t;
        }
        // The frequency maximum sits at zero frequency.
        EXPECT_NEAR(kyp_frequency_lambda(k, default_frequency_grid(dom)), kyp_static_lambda(k), 1e-9) << t;
    }
}
