#pragma once

/**
 * @file demos.hpp
 * @brief Worked instances: buffer transport network, vehicle formation, and
 * minimal-loss power flow on a resistive-inductive line network.
 */

#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "pqp.hpp"
#include "synthesis.hpp"

namespace posctl::demos {

/// Flow rates of the four-buffer network.
struct TransportRates {
    double l12 = 1.0, l23 = 0.0, l31 = 2.0, l32 = 1.0, l34 = 1.0, l43 = 2.0;
};

[[nodiscard]] inline Matrix transport_matrix(const TransportRates& r = {}) {
    return Matrix{{-1.0 - r.l31, r.l12, 0.0, 0.0},
                  {0.0, -r.l12 - r.l32, r.l23, 0.0},
                  {r.l31, r.l32, -r.l23 - r.l43, r.l34},
                  {0.0, 0.0, r.l43, -4.0 - r.l34}};
}

/// Gains (l12, l32, l23) in [0, 1] with l31 = 2, l34 = 1, l43 = 2 fixed.
[[nodiscard]] inline SynthesisProblem transport_synthesis() {
    SynthesisProblem p;
    p.A = Matrix{{-3, 0, 0, 0}, {0, 0, 0, 0}, {2, 0, -2, 1}, {0, 0, 2, -5}};
    p.B = Matrix(4, 0);
    p.C = Matrix(0, 4);
    p.D = Matrix(0, 0);
    p.E = Matrix{{1, 0, 0}, {-1, -1, 1}, {0, 1, -1}, {0, 0, 0}};
    p.F = Matrix{{0, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
    p.G = Matrix(0, 3);
    p.H = Matrix(3, 0);
    p.direction = Direction::linf;
    return p;
}

inline const std::vector<std::string>& transport_gain_names() {
    static const std::vector<std::string> names{"l12", "l32", "l23"};
    return names;
}

/// Disturbance patterns of the three formation cases.
enum class FormationCase { uniform, front_heavy, rear_heavy };

/// Gains (l13, l21, l23, l32, l34, l43) in [0, 1], 1-induced gain from w to
/// the summed positions.
[[nodiscard]] inline SynthesisProblem formation_synthesis(FormationCase c = FormationCase::uniform) {
    SynthesisProblem q;
    q.direction = Direction::l1;
    q.A = Matrix{{-1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, -4}};
    switch (c) {
    case FormationCase::uniform:
        q.B = Matrix{{1}, {1}, {1}, {1}};
        break;
    case FormationCase::front_heavy:
        q.B = Matrix{{10}, {10}, {1}, {1}};
        break;
    case FormationCase::rear_heavy:
        q.B = Matrix{{1}, {1}, {10}, {10}};
        break;
    }
    q.C = Matrix{{1, 1, 1, 1}};
    q.D = Matrix(1, 1);
    q.E = Matrix{{1, 0, 0, 0, 0, 0}, {0, 1, 1, 0, 0, 0}, {0, 0, 0, 1, 1, 0}, {0, 0, 0, 0, 0, 1}};
    q.F = Matrix{{-1, 0, 1, 0}, {1, -1, 0, 0}, {0, -1, 1, 0}, {0, 1, -1, 0}, {0, 0, -1, 1}, {0, 0, 1, -1}};
    q.G = Matrix(1, 6);
    q.H = Matrix(6, 1);
    return q;
}

inline const std::vector<std::string>& formation_gain_names() {
    static const std::vector<std::string> names{"l13", "l21", "l23", "l32", "l34", "l43"};
    return names;
}

/// Reference optima and gain patterns for the three formation cases.
struct FormationReference {
    double gamma;
    std::vector<double> gains;
};

[[nodiscard]] inline FormationReference formation_reference(FormationCase c) {
    switch (c) {
    case FormationCase::uniform:
        return {4.125, {0, 1, 1, 0, 1, 0}};
    case FormationCase::front_heavy:
        return {15.562, {1, 1, 1, 0, 1, 0}};
    default:
        return {12.750, {0, 1, 0, 1, 1, 0}};
    }
}

// ---------------------------------------------------------------------------
// Power flow
// ---------------------------------------------------------------------------

struct PowerNode {
    double p_max = 0.0;  ///< > 0 generation capacity, < 0 required consumption
    double v_min = 0.9, v_max = 1.1;
};

struct PowerLine {
    std::size_t from = 0, to = 0;  ///< current counted positive from `from` to `to`
    double R = 0.1, L = 1.0;
    double capacity = 0.5;         ///< bound on (v_from - v_to)^2
};

struct PowerNetwork {
    std::vector<PowerNode> nodes;
    std::vector<PowerLine> lines;

    void validate() const {
        const std::size_t n = nodes.size();
        if (n == 0 || lines.empty())
            throw std::invalid_argument("power network: needs nodes and lines");
        std::vector<std::size_t> parent(n);
        for (std::size_t i = 0; i < n; ++i)
            parent[i] = i;
        auto find = [&](std::size_t i) {
            while (parent[i] != i)
                i = parent[i] = parent[parent[i]];
            return i;
        };
        for (const auto& l : lines) {
            if (l.from >= n || l.to >= n || l.from == l.to)
                throw std::invalid_argument("power network: line endpoints invalid");
            if (!(l.R > 0.0) || !(l.L > 0.0))
                throw std::invalid_argument("power network: R and L must be positive");
            if (!(l.capacity > 0.0))
                throw std::invalid_argument("power network: line capacity must be positive");
            parent[find(l.from)] = find(l.to);
        }
        for (const auto& nd : nodes)
            if (!(nd.v_min >= 0.0) || !(nd.v_min <= nd.v_max))
                throw std::invalid_argument("power network: need 0 <= v_min <= v_max");
        for (std::size_t i = 1; i < n; ++i)
            if (find(i) != find(0))
                throw std::invalid_argument("power network: graph is not connected");
    }
};

/// Four nodes, lines (4,1), (2,1), (3,2), (4,2); generators at 1 and 4, loads at 2 and 3.
[[nodiscard]] inline PowerNetwork default_power_network() {
    PowerNetwork net;
    net.nodes = {{1.0, 0.9, 1.1}, {-0.3, 0.9, 1.1}, {-0.3, 0.9, 1.1}, {1.0, 0.9, 1.1}};
    net.lines = {{3, 0, 0.1, 1.0, 0.5}, {1, 0, 0.1, 1.0, 0.5}, {2, 1, 0.1, 1.0, 0.5}, {3, 1, 0.1, 1.0, 0.5}};
    return net;
}

/// Generator (node 1) feeding a load demanding `demand` over one line.
[[nodiscard]] inline PowerNetwork two_node_network(double demand = 0.3, double R = 0.1, double v_max = 1.1) {
    PowerNetwork net;
    net.nodes = {{10.0, 0.0, v_max}, {-demand, 0.0, v_max}};
    net.lines = {{0, 1, R, 1.0, 10.0}};
    return net;
}

/// Minimal loss of the two-node network: the load sits at the larger root of
/// v (vbar - v) = P R and the generator at vbar.
[[nodiscard]] inline double two_node_loss(double demand, double R, double v_max) {
    const double disc = v_max * v_max - 4.0 * demand * R;
    if (disc < 0.0)
        throw std::domain_error("two_node_loss: demand cannot be met");
    const double v2 = 0.5 * (v_max + std::sqrt(disc));
    const double d = v_max - v2;
    return d * d / R;
}

/// Line currents are the states, node voltages the inputs:
/// L_e di_e/dt = -R_e i_e + v_from - v_to.
struct PowerStateSpace {
    Matrix A, B;
    Matrix K;  ///< node injections i = K x (Kirchhoff)
};

[[nodiscard]] inline PowerStateSpace power_state_space(const PowerNetwork& net) {
    net.validate();
    const std::size_t n = net.nodes.size(), e = net.lines.size();
    PowerStateSpace s{Matrix(e, e), Matrix(e, n), Matrix(n, e)};
    for (std::size_t k = 0; k < e; ++k) {
        const auto& l = net.lines[k];
        s.A(k, k) = -l.R / l.L;
        s.B(k, l.from) = 1.0 / l.L;
        s.B(k, l.to) = -1.0 / l.L;
        s.K(l.from, k) = 1.0;
        s.K(l.to, k) = -1.0;
    }
    return s;
}

/// The power flow problem as a positive quadratic program in the voltages:
/// maximize -loss subject to the power, capacity and magnitude constraints,
/// each written as u^T M u >= b.
struct PowerProgram {
    PqpInstance pqp;
    std::vector<std::string> labels;  ///< one per constraint
    std::vector<Matrix> Q;            ///< quadratic forms in (x, u), objective first
    bool metzler = true;              ///< all reduced forms Metzler
};

[[nodiscard]] inline PowerProgram power_program(const PowerNetwork& net) {
    const PowerStateSpace ss = power_state_space(net);
    const std::size_t n = net.nodes.size(), e = net.lines.size(), N = e + n;
    // [x; u] = T u on the equilibrium manifold A x + B u = 0.
    const Matrix T = vertcat(-1.0 * solve(ss.A, ss.B), Matrix::identity(n));

    auto sym = [](Matrix M) { return 0.5 * (M + M.transpose()); };
    // i_k v_k as a form in (x, u).
    auto injection_power = [&](std::size_t k) {
        Matrix Q(N, N);
        for (std::size_t j = 0; j < e; ++j)
            Q(j, e + k) = ss.K(k, j);
        return sym(Q);
    };

    PowerProgram out;
    Matrix loss(N, N);
    for (std::size_t k = 0; k < n; ++k)
        loss += injection_power(k);
    out.Q.push_back(-1.0 * loss);

    auto add = [&](Matrix Q, double b, std::string label) {
        out.Q.push_back(Q);
        out.pqp.b.push_back(b);
        out.labels.push_back(std::move(label));
    };
    for (std::size_t k = 0; k < n; ++k)
        add(-1.0 * injection_power(k), -net.nodes[k].p_max, "power[" + std::to_string(k + 1) + "]");
    for (const auto& l : net.lines) {
        Matrix Q(N, N);
        Q(e + l.from, e + l.from) = Q(e + l.to, e + l.to) = -1.0;
        Q(e + l.from, e + l.to) = Q(e + l.to, e + l.from) = 1.0;
        add(Q, -l.capacity,
            "capacity[" + std::to_string(l.from + 1) + "," + std::to_string(l.to + 1) + "]");
    }
    for (std::size_t k = 0; k < n; ++k) {
        Matrix hi(N, N), lo(N, N);
        hi(e + k, e + k) = -1.0;
        lo(e + k, e + k) = 1.0;
        add(hi, -net.nodes[k].v_max * net.nodes[k].v_max, "vmax[" + std::to_string(k + 1) + "]");
        if (net.nodes[k].v_min > 0.0)
            add(lo, net.nodes[k].v_min * net.nodes[k].v_min, "vmin[" + std::to_string(k + 1) + "]");
    }

    auto reduce = [&](const Matrix& Q) { return sym(T.transpose() * Q * T); };
    out.pqp.M0 = reduce(out.Q[0]);
    for (std::size_t k = 1; k < out.Q.size(); ++k)
        out.pqp.M.push_back(reduce(out.Q[k]));
    out.metzler = is_metzler(out.pqp.M0);
    for (const auto& M : out.pqp.M)
        out.metzler = out.metzler && is_metzler(M);
    return out;
}

struct PowerFlowReport {
    double primal_loss = 0.0;  ///< minimal loss from the static primal
    double dual_loss = 0.0;    ///< the same from the multiplier problem
    Vector voltages;
    Vector tau;
    std::vector<std::string> labels;
    int cuts = 0;

    [[nodiscard]] double gap() const { return std::abs(primal_loss - dual_loss); }
};

[[nodiscard]] inline PowerFlowReport power_flow(const PowerNetwork& net, const CutOptions& opt = {}) {
    const PowerProgram prog = power_program(net);
    if (!prog.metzler)
        throw StructureError("power_flow: a reduced quadratic form is not Metzler");
    const PqpPrimalResult primal = pqp_primal(prog.pqp);
    const PqpDualResult dual = pqp_dual(prog.pqp, opt);
    PowerFlowReport rep;
    rep.primal_loss = -primal.value;
    rep.dual_loss = -dual.value;
    rep.voltages = primal.x;
    rep.tau = dual.tau;
    rep.labels = prog.labels;
    rep.cuts = dual.cuts;
    return rep;
}

}  // namespace posctl::demos
