#include <gtest/gtest.h>

#include "support.hpp"

using namespace posctl;
using namespace posctl::testing;

TEST(PowerFlow, ProgramIsPositive) {
    const demos::PowerProgram prog = demos::power_program(demos::default_power_network());
    EXPECT_TRUE(prog.metzler);
    EXPECT_NO_THROW(prog.pqp.validate());
    EXPECT_EQ(prog.labels.size(), prog.pqp.constraints());
    // Equilibrium currents follow Ohm's law: x = -A^{-1} B u.
    const demos::PowerStateSpace ss = demos::power_state_space(demos::default_power_network());
    EXPECT_TRUE(is_metzler(ss.A));
    EXPECT_LT(oracle_abscissa(ss.A), 0.0);
}

TEST(PowerFlow, DefaultNetworkDualityGap) {
    const demos::PowerNetwork net = demos::default_power_network();
    const demos::PowerFlowReport rep = demos::power_flow(net);
    EXPECT_LE(rep.gap(), 1e-3);
    EXPECT_GT(rep.primal_loss, 0.0);
    const demos::PowerProgram prog = demos::power_program(net);
    for (std::size_t k = 0; k < prog.pqp.constraints(); ++k)
        EXPECT_GE(quadratic_form(prog.pqp.M[k], rep.voltages), prog.pqp.b[k] - 1e-7) << prog.labels[k];
    for (std::size_t k = 0; k < net.nodes.size(); ++k) {
        EXPECT_GE(rep.voltages[k], net.nodes[k].v_min - 1e-9);
        EXPECT_LE(rep.voltages[k], net.nodes[k].v_max + 1e-9);
    }
}

TEST(PowerFlow, TwoNodeClosedForm) {
    for (double demand : {0.1, 0.3, 1.0})
        for (double R : {0.05, 0.1, 0.2}) {
            const demos::PowerFlowReport rep = demos::power_flow(demos::two_node_network(demand, R, 1.1));
            const double exact = demos::two_node_loss(demand, R, 1.1);
            EXPECT_NEAR(rep.primal_loss, exact, 1e-6) << demand << " " << R;
            EXPECT_NEAR(rep.dual_loss, exact, 1e-6) << demand << " " << R;
        }
    EXPECT_THROW((void)demos::two_node_loss(10.0, 0.1, 1.1), std::domain_error);
}

TEST(PowerFlow, TwoNodeGridOracle) {
    // Scan generator and load voltages; loss (v1 - v2)^2 / R subject to the
    // load receiving v2 (v1 - v2) / R >= demand.
    const double demand = 0.3, R = 0.1, vmax = 1.1;
    double best = std::numeric_limits<double>::infinity();
    const int N = 2000;
    for (int a = 0; a <= N; ++a) {
        const double v1 = vmax * a / N;
        // For fixed v1 the smallest admissible drop is the larger root.
        const double disc = v1 * v1 - 4.0 * demand * R;
        if (disc < 0.0)
            continue;
        const double v2 = 0.5 * (v1 + std::sqrt(disc));
        best = std::min(best, (v1 - v2) * (v1 - v2) / R);
    }
    EXPECT_NEAR(demos::power_flow(demos::two_node_network(demand, R, vmax)).primal_loss, best, 1e-6);
}

TEST(PowerNetwork, Validation) {
    demos::PowerNetwork net = demos::two_node_network();
    net.lines[0].to = 0;
    EXPECT_THROW(net.validate(), std::invalid_argument);
    net = demos::two_node_network();
    net.nodes.push_back({0.0, 0.9, 1.1});
    EXPECT_THROW(net.validate(), std::invalid_argument);
    net = demos::two_node_network();
    net.lines[0].R = 0.0;
    EXPECT_THROW(net.validate(), std::invalid_argument);
}

TEST(Formation, ReferenceGainsAttainTheirGamma) {
    const demos::FormationCase cases[3] = {demos::FormationCase::uniform, demos::FormationCase::front_heavy,
                                           demos::FormationCase::rear_heavy};
    for (auto c : cases) {
        const SynthesisProblem q = demos::formation_synthesis(c);
        const demos::FormationReference ref = demos::formation_reference(c);
        const PositiveStateSpace cl = closed_loop(q, Matrix::diagonal(ref.gains));
        const EMat G = to_eigen(cl.D) - to_eigen(cl.C) * to_eigen(cl.A).inverse() * to_eigen(cl.B);
        EXPECT_NEAR(max_col_sum(G), ref.gamma, 1e-3);
    }
}
