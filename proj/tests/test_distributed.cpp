#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace posctl;
using namespace posctl::testing;

namespace {

const Vector kReferenceXi{0.5, 0.5, 1.69, 0.87};

std::size_t edge_count(const Matrix& A) {
    std::size_t e = 0;
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            e += i != j && A(i, j) != 0.0;
    return e;
}

}  // namespace

TEST(DistributedCertificate, IdentityStopsImmediately) {
    const DistributedCertificate c = distributed_certificate(-1.0 * Matrix::identity(3));
    EXPECT_TRUE(c.converged);
    EXPECT_EQ(c.rounds, 0u);
    EXPECT_EQ(c.xi, Vector(3, 1.0));
    EXPECT_EQ(c.messages, 0u);
}

TEST(DistributedCertificate, TransportNetworkConverges) {
    const Matrix A = demos::transport_matrix();
    const DistributedCertificate c = distributed_certificate(A);
    ASSERT_TRUE(c.converged);
    EXPECT_TRUE(verify_rowwise(A, {CertificateKind::primal_xi, c.xi, 0.0, TimeDomain::continuous}).pass);
    EXPECT_EQ(c.messages_per_round, 5u);
    EXPECT_EQ(c.messages, 5u * (c.rounds + 1));
    EXPECT_EQ(c.audit.violations, 0u);
}

TEST(DistributedCertificate, UnstableTimesOut) {
    DistributedOptions opt;
    opt.max_rounds = 5000;
    const DistributedCertificate c = distributed_certificate(Matrix{{0.0, 1.0}, {1.0, 0.0}}, opt);
    EXPECT_FALSE(c.converged);
    EXPECT_EQ(c.rounds, 5000u);
}

TEST(DistributedCertificate, InputValidation) {
    const Matrix A = demos::transport_matrix();
    DistributedOptions opt;
    opt.step = 1.0;  // beyond 0.5 / 5
    EXPECT_THROW((void)distributed_certificate(A, opt), std::invalid_argument);
    opt.step = 0.0;
    opt.delta = 0.0;
    EXPECT_THROW((void)distributed_certificate(A, opt), std::invalid_argument);
    opt.delta = 1e-6;
    opt.xi0 = {1.0, 1.0};
    EXPECT_THROW((void)distributed_certificate(A, opt), DimensionError);
    opt.xi0 = {1.0, 0.0, 1.0, 1.0};
    EXPECT_THROW((void)distributed_certificate(A, opt), std::invalid_argument);
    EXPECT_THROW((void)distributed_certificate(Matrix{{-1.0, -1.0}, {0.0, -1.0}}), StructureError);
}

TEST(DistributedCertificate, TraceLines) {
    std::ostringstream out;
    DistributedOptions opt;
    std::size_t records = 0;
    opt.trace = [&](const TraceRecord& r) {
        out << to_json_line(r) << '\n';
        ++records;
    };
    const DistributedCertificate c = distributed_certificate(demos::transport_matrix(), opt);
    EXPECT_EQ(records, 4 * (c.rounds + 1));
    EXPECT_EQ(to_json_line({2, 1, 0.5, 0.25}), R"({"round":2,"node":1,"xi":0.5,"slack":0.25})");
}

TEST(DistributedVerify, Examples) {
    const Matrix A = demos::transport_matrix();
    const DistributedReport ok = distributed_verify(A, kReferenceXi);
    EXPECT_TRUE(ok.pass);
    ASSERT_EQ(ok.nodes.size(), 4u);
    for (const auto& v : ok.nodes)
        EXPECT_TRUE(v.pass) << v.node;
    EXPECT_NEAR(ok.nodes[3].slack, 0.97, 1e-12);
    EXPECT_EQ(ok.messages, edge_count(A));
    EXPECT_EQ(ok.audit.violations, 0u);

    Vector bad = kReferenceXi;
    bad[2] = 0.1;
    const DistributedReport no = distributed_verify(A, bad);
    EXPECT_FALSE(no.pass);
    EXPECT_FALSE(no.nodes[2].pass);  // -2 xi_3 no longer covers the inflow
    EXPECT_TRUE(no.nodes[3].pass);

    const DistributedReport one = distributed_verify(Matrix{{-1.0}}, Vector{1.0});
    EXPECT_TRUE(one.pass);
    EXPECT_EQ(one.messages, 0u);

    EXPECT_THROW((void)distributed_verify(A, Vector{1.0}), DimensionError);
}

TEST(DistributedProperty, LocalityAudit) {
    // A node that never received a neighbor's value counts a violation.
    Network net(demos::transport_matrix(), Vector(4, 1.0));
    AccessAudit audit;
    (void)net.nodes()[2].row_product(audit);
    EXPECT_GT(audit.violations, 0u);
    net.exchange();
    AccessAudit after;
    for (const auto& node : net.nodes())
        (void)node.row_product(after);
    EXPECT_EQ(after.violations, 0u);
    EXPECT_EQ(after.neighbor_reads, edge_count(demos::transport_matrix()));
}

TEST(DistributedProperty, TimeoutIffUnstable) {
    Rng r(91);
    int stable = 0, unstable = 0;
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = static_cast<std::size_t>(r.integer(1, 8));
        const double target = t % 2 ? r.uniform(-1.0, -0.01) : r.uniform(0.0, 0.5);
        const Matrix A = metzler_with_abscissa(r, n, target);
        const double alpha = oracle_abscissa(A);
        const DistributedCertificate c = distributed_certificate(A);
        EXPECT_EQ(c.converged, alpha < 0.0) << t << " abscissa " << alpha;
        EXPECT_EQ(c.audit.violations, 0u);
        EXPECT_EQ(c.messages_per_round, edge_count(A));
        if (c.converged) {
            ++stable;
            EXPECT_TRUE(verify_rowwise(A, {CertificateKind::primal_xi, c.xi, 0.0, TimeDomain::continuous}).pass);
        } else {
            ++unstable;
        }
    }
    EXPECT_GT(stable, 20);
    EXPECT_GT(unstable, 20);
}
