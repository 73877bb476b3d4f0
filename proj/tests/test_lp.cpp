#include <gtest/gtest.h>

#include "support.hpp"

using namespace posctl;
using namespace posctl::testing;

TEST(LpSolve, BoundedMaximum) {
    lp::Builder b(1);
    b.set_objective(0, -1.0);
    b.add_row({{0, 1.0}}, 1.0);
    const lp::Outcome o = lp::solve(b.build());
    ASSERT_TRUE(o.optimal());
    EXPECT_NEAR(o.y[0], 1.0, 1e-12);
    EXPECT_NEAR(o.objective, -1.0, 1e-12);
}

TEST(LpSolve, InfeasibleReportedByStatus) {
    lp::Builder b(1);
    b.add_row({{0, 1.0}}, -1.0);
    EXPECT_EQ(lp::solve(b.build()).status, lp::Status::infeasible);
}

TEST(LpSolve, UnboundedReportedByStatus) {
    lp::Builder b(2);
    b.set_objective(0, -1.0);
    b.add_row({{0, 1.0}, {1, -1.0}}, 1.0);
    EXPECT_EQ(lp::solve(b.build()).status, lp::Status::unbounded);
}

TEST(LpSolve, FreeVariablesAndEqualities) {
    // min x + y  s.t. x - y == 1, x >= -3 (free), y free, y >= -2
    lp::Builder b(2);
    b.set_free(0);
    b.set_free(1);
    b.set_objective(0, 1.0);
    b.set_objective(1, 1.0);
    b.add_row({{0, 1.0}, {1, -1.0}}, 1.0, false, true);
    b.add_row({{0, -1.0}}, 3.0);
    b.add_row({{1, -1.0}}, 2.0);
    const lp::Outcome o = lp::solve(b.build());
    ASSERT_TRUE(o.optimal());
    EXPECT_NEAR(o.y[0], -1.0, 1e-12);
    EXPECT_NEAR(o.y[1], -2.0, 1e-12);
}

TEST(LpSolve, DimensionMismatchThrows) {
    lp::LinearProgram p;
    p.c = {1.0};
    p.M = Matrix(1, 2);
    p.b = {0.0};
    EXPECT_THROW((void)lp::solve(p), DimensionError);
}

lp::LinearProgram strict_system(const Matrix& A) {
    // A xi < 0 with 0 <= xi <= n
    const std::size_t n = A.rows();
    lp::Builder b(n);
    for (std::size_t i = 0; i < n; ++i)
        b.add_dense_row(std::vector<double>(A.row(i).begin(), A.row(i).end()), 0.0, true);
    for (std::size_t i = 0; i < n; ++i)
        b.add_row({{i, 1.0}}, static_cast<double>(n));
    return b.build();
}

TEST(LpMargin, IdentityIsStrictlyFeasible) {
    const lp::Outcome o = lp::feasibility_with_margin(strict_system(-1.0 * Matrix::identity(2)));
    ASSERT_TRUE(o.optimal());
    EXPECT_GT(o.margin, 0.0);
    EXPECT_NEAR(o.margin, 1.0, 1e-12);
}

TEST(LpMargin, UnstableMetzlerIsNotStrictlyFeasible) {
    const lp::Outcome o = lp::feasibility_with_margin(strict_system(Matrix{{0, 1}, {1, 0}}));
    EXPECT_FALSE(o.optimal() && o.margin > lp::kMarginFloor);
}

TEST(LpMargin, TransportRowsHold) {
    const Matrix A = demos::transport_matrix();
    const lp::Outcome o = lp::feasibility_with_margin(strict_system(A));
    ASSERT_TRUE(o.optimal());
    const Vector Ax = A * o.y;
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_LT(Ax[i], 0.0);
        EXPECT_GT(o.y[i], -1e-12);
    }
}

TEST(LpProperty, SolutionsSatisfyConstraints) {
    Rng r(21);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = static_cast<std::size_t>(r.integer(1, 6)), m = static_cast<std::size_t>(r.integer(1, 8));
        lp::LinearProgram p;
        p.M = Matrix(m + 1, n);
        p.b.resize(m + 1);
        Vector y0(n);
        for (double& v : y0)
            v = r.uniform(0, 2);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                p.M(i, j) = r.uniform(-1, 1);
            p.b[i] = dot(p.M.row(i), y0) + r.uniform(0, 1);
        }
        for (std::size_t j = 0; j < n; ++j)
            p.M(m, j) = 1.0;  // keeps the LP bounded
        p.b[m] = 100.0;
        p.c.resize(n);
        for (double& v : p.c)
            v = r.uniform(-1, 1);
        const lp::Outcome o = lp::solve(p);
        ASSERT_TRUE(o.optimal()) << "trial " << t;
        const Vector My = p.M * o.y;
        for (std::size_t i = 0; i <= m; ++i)
            EXPECT_LE(My[i], p.b[i] + 1e-9);
        for (double v : o.y)
            EXPECT_GE(v, -1e-9);
        EXPECT_LE(o.objective, dot(p.c, y0) + 1e-9);  // y0 is feasible
        // Deterministic pivoting.
        const lp::Outcome again = lp::solve(p);
        EXPECT_EQ(o.y, again.y);
    }
}

TEST(LpProperty, InteriorPointGivesPositiveMargin) {
    Rng r(22);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = static_cast<std::size_t>(r.integer(1, 6)), m = static_cast<std::size_t>(r.integer(1, 8));
        lp::LinearProgram p;
        p.M = Matrix(m, n);
        p.b.resize(m);
        p.c.assign(n, 0.0);
        Vector y0(n);
        for (double& v : y0)
            v = r.uniform(0.1, 2);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                p.M(i, j) = r.uniform(-1, 1);
            p.b[i] = dot(p.M.row(i), y0) + r.uniform(0.01, 1);
            p.strict_rows.push_back(i);
        }
        const lp::Outcome o = lp::feasibility_with_margin(p);
        ASSERT_TRUE(o.optimal()) << "trial " << t;
        EXPECT_GT(o.margin, 0.0);
        const Vector My = p.M * o.y;
        for (std::size_t i = 0; i < m; ++i)
            EXPECT_LT(My[i], p.b[i]);
    }
}
