#pragma once

/**
 * @file distributed.hpp
 * @brief Round-based message passing over the sparsity graph of a Metzler A.
 *
 * Node i owns a_ii and the coefficients a_ij of its in-neighbors j (a_ij != 0)
 * and nothing else. Each synchronous round every node sends its xi_j along
 * its out-edges, then evaluates (A xi)_i from its inbox. Certificate search
 * runs the Euler flow xi <- xi + h A xi, which stays positive for
 * h <= 1/max|a_ii| and turns xi toward a vector with A xi < 0 whenever A is
 * Hurwitz.
 */

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"

namespace posctl {

/// Directed edge (i, j): node i needs xi_j, i.e. A(i, j) != 0 with i != j.
struct Topology {
    std::size_t nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    [[nodiscard]] static Topology of(const Matrix& A) {
        if (!A.is_square())
            throw DimensionError("topology: matrix must be square");
        Topology t;
        t.nodes = A.rows();
        for (std::size_t i = 0; i < A.rows(); ++i)
            for (std::size_t j = 0; j < A.cols(); ++j)
                if (i != j && A(i, j) != 0.0)
                    t.edges.emplace_back(i, j);
        return t;
    }
};

struct AccessAudit {
    std::size_t neighbor_reads = 0;
    std::size_t violations = 0;  ///< reads of values the node has no edge for
};

/// Local view of one node; a global matrix is never stored here.
class NodeState {
public:
    NodeState(std::size_t id, double diag, std::vector<std::pair<std::size_t, double>> in_coeffs, double xi)
        : id_(id), diag_(diag), in_(std::move(in_coeffs)), xi_(xi) {}

    [[nodiscard]] std::size_t id() const noexcept { return id_; }
    [[nodiscard]] double xi() const noexcept { return xi_; }
    [[nodiscard]] double diag() const noexcept { return diag_; }
    [[nodiscard]] const std::vector<std::pair<std::size_t, double>>& in_neighbors() const noexcept { return in_; }

    void receive(std::size_t from, double value) { inbox_[from] = value; }

    /// (A xi)_i from own value and inbox contents.
    [[nodiscard]] double row_product(AccessAudit& audit) const {
        double s = diag_ * xi_;
        for (const auto& [j, a] : in_) {
            const auto it = inbox_.find(j);
            ++audit.neighbor_reads;
            if (it == inbox_.end()) {
                ++audit.violations;
                continue;
            }
            s += a * it->second;
        }
        return s;
    }

    void set_xi(double v) noexcept { xi_ = v; }

private:
    std::size_t id_;
    double diag_;
    std::vector<std::pair<std::size_t, double>> in_;
    double xi_;
    std::unordered_map<std::size_t, double> inbox_;
};

/// Lockstep simulator. Node updates within a round see only the previous
/// round's messages, so the order of node evaluation is irrelevant.
class Network {
public:
    Network(const Matrix& A, std::span<const double> xi0) : topology_(Topology::of(A)) {
        if (xi0.size() != A.rows())
            throw DimensionError("network: initial vector has wrong length");
        for (std::size_t i = 0; i < A.rows(); ++i) {
            std::vector<std::pair<std::size_t, double>> in;
            for (std::size_t j = 0; j < A.cols(); ++j)
                if (j != i && A(i, j) != 0.0)
                    in.emplace_back(j, A(i, j));
            nodes_.emplace_back(i, A(i, i), std::move(in), xi0[i]);
        }
    }

    [[nodiscard]] const Topology& topology() const noexcept { return topology_; }
    [[nodiscard]] const std::vector<NodeState>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::vector<NodeState>& nodes() noexcept { return nodes_; }
    [[nodiscard]] const AccessAudit& audit() const noexcept { return audit_; }
    [[nodiscard]] AccessAudit& audit() noexcept { return audit_; }

    /// One message per directed edge; returns the number sent.
    std::size_t exchange() {
        for (const auto& [i, j] : topology_.edges)
            nodes_[i].receive(j, nodes_[j].xi());
        return topology_.edges.size();
    }

    [[nodiscard]] Vector xi() const {
        Vector v(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            v[i] = nodes_[i].xi();
        return v;
    }

private:
    Topology topology_;
    std::vector<NodeState> nodes_;
    AccessAudit audit_;
};

struct TraceRecord {
    std::size_t round = 0;
    std::size_t node = 0;
    double xi = 0.0;
    double slack = 0.0;
};

/// One JSON object per line, numbers with 17 significant digits.
[[nodiscard]] inline std::string to_json_line(const TraceRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "{\"round\":%zu,\"node\":%zu,\"xi\":%.17g,\"slack\":%.17g}", r.round, r.node, r.xi,
                  r.slack);
    return buf;
}

using TraceSink = std::function<void(const TraceRecord&)>;

struct DistributedOptions {
    double step = 0.0;   ///< 0 selects 0.5 / max|a_ii|
    double delta = 1e-6; ///< required relative slack -A_i xi >= delta xi_i
    std::size_t max_rounds = 1'000'000;
    Vector xi0;          ///< empty means all ones
    TraceSink trace;
};

struct DistributedCertificate {
    bool converged = false;
    Vector xi;
    std::size_t rounds = 0;            ///< rounds completed before termination
    std::size_t messages = 0;
    std::size_t messages_per_round = 0;
    std::size_t rescalings = 0;
    AccessAudit audit;
};

[[nodiscard]] inline double max_step(const Matrix& A) {
    double amax = 0.0;
    for (double d : A.diag())
        amax = std::max(amax, std::abs(d));
    return amax > 0.0 ? 0.5 / amax : 0.5;
}

/// Euler-flow certificate search. `converged` is false on timeout.
[[nodiscard]] inline DistributedCertificate distributed_certificate(const Matrix& A, const DistributedOptions& opt = {}) {
    if (!A.is_square())
        throw DimensionError("distributed_certificate: matrix must be square");
    if (!is_metzler(A))
        throw StructureError("distributed_certificate: matrix must be Metzler");
    const std::size_t n = A.rows();
    const double limit = max_step(A);
    const double h = opt.step > 0.0 ? opt.step : limit;
    if (!(h > 0.0) || h > limit * (1.0 + 1e-12))
        throw std::invalid_argument("distributed_certificate: step must lie in (0, 0.5/max|a_ii|]");
    if (!(opt.delta > 0.0))
        throw std::invalid_argument("distributed_certificate: delta must be positive");
    Vector xi0 = opt.xi0.empty() ? Vector(n, 1.0) : opt.xi0;
    if (xi0.size() != n)
        throw DimensionError("distributed_certificate: initial vector has wrong length");
    for (double v : xi0)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("distributed_certificate: initial vector must be positive");

    Network net(A, xi0);
    DistributedCertificate out;
    out.messages_per_round = net.topology().edges.size();
    Vector Axi(n);
    for (std::size_t round = 0;; ++round) {
        out.messages += net.exchange();
        bool done = true;
        for (std::size_t i = 0; i < n; ++i) {
            const NodeState& node = net.nodes()[i];
            Axi[i] = node.row_product(net.audit());
            const double slack = -Axi[i];
            if (opt.trace)
                opt.trace({round, i, node.xi(), slack});
            done = done && slack >= opt.delta * node.xi();
        }
        // The convergence monitor is global; the computation above is local.
        if (done) {
            out.converged = true;
            out.rounds = round;
            break;
        }
        if (round >= opt.max_rounds) {
            out.rounds = round;
            break;
        }
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            NodeState& node = net.nodes()[i];
            node.set_xi(node.xi() + h * Axi[i]);
            lo = std::min(lo, node.xi());
            hi = std::max(hi, node.xi());
        }
        // Keep the iterate in floating-point range. A common power-of-two
        // factor is exact and leaves every slack ratio unchanged.
        if (hi > 0x1p+500 || (lo < 0x1p-500 && hi < 0x1p-100)) {
            const double factor = hi > 0x1p+500 ? 0x1p-500 : 0x1p+400;
            for (NodeState& node : net.nodes())
                node.set_xi(node.xi() * factor);
            ++out.rescalings;
        }
        if (!(hi > 0.0))
            break;  // collapsed to zero; cannot certify
    }
    out.xi = net.xi();
    out.audit = net.audit();
    return out;
}

struct NodeVerdict {
    std::size_t node = 0;
    double slack = 0.0;
    bool pass = false;
};

struct DistributedReport {
    std::vector<NodeVerdict> nodes;
    bool pass = true;
    std::size_t messages = 0;
    AccessAudit audit;
};

/// Each node checks -(A xi)_i > 0 with xi_i > 0 using one round of messages.
[[nodiscard]] inline DistributedReport distributed_verify(const Matrix& A, std::span<const double> xi) {
    if (!A.is_square())
        throw DimensionError("distributed_verify: matrix must be square");
    if (xi.size() != A.rows())
        throw DimensionError("distributed_verify: certificate length differs from node count");
    Network net(A, xi);
    DistributedReport rep;
    rep.messages = net.exchange();
    for (const NodeState& node : net.nodes()) {
        const double slack = -node.row_product(net.audit());
        const bool ok = slack > 0.0 && node.xi() > 0.0;
        rep.nodes.push_back({node.id(), slack, ok});
        rep.pass = rep.pass && ok;
    }
    rep.audit = net.audit();
    return rep;
}

}  // namespace posctl
