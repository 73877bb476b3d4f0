// posctl: command-line front end. Exit codes: 0 positive verdict, 1 negative
// verdict, 2 usage, schema or numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "posctl.hpp"
#include "posctl/model_io.hpp"

using namespace posctl;
using nlohmann::json;

namespace {

constexpr int kPositive = 0;
constexpr int kNegative = 1;
constexpr int kFailure = 2;

struct Args {
    std::string input;
    std::string json_out;
    std::string trace;
    std::optional<double> gamma;
    std::string p = "inf";
    std::size_t grid = 400;
    std::size_t max_rounds = 1'000'000;
    double step = 0.0;
    std::optional<double> tol;
    std::string preset;
};

/// Usage problems found after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt(std::span<const double> v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + fmt(v[i]);
    return s + ")";
}

void print_matrix(const char* name, const Matrix& M) {
    std::cout << name << " =\n";
    for (std::size_t r = 0; r < M.rows(); ++r) {
        std::cout << "  ";
        for (std::size_t c = 0; c < M.cols(); ++c) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%12.6g", M(r, c));
            std::cout << buf;
        }
        std::cout << '\n';
    }
}

void print_rows(const RowReport& rep, const char* label = "row") {
    for (const auto& r : rep.rows)
        std::cout << "  " << label << ' ' << r.row + 1 << ": slack " << fmt(r.slack) << (r.pass ? "  ok" : "  FAIL")
                  << '\n';
}

json rows_json(const RowReport& rep) {
    json a = json::array();
    for (const auto& r : rep.rows)
        a.push_back({{"row", r.row + 1}, {"slack", r.slack}, {"pass", r.pass}});
    return a;
}

template<typename T>
const T& expect(const io::Model& m, const char* command) {
    if (const T* p = std::get_if<T>(&m))
        return *p;
    throw UsageError(std::string(command) + ": model kind \"" + io::kind_name(m) + "\" is not accepted here");
}

io::Model load(const Args& a) {
    if (a.input.empty())
        throw UsageError("--input is required");
    return io::load_model(a.input);
}

json load_raw(const Args& a) {
    std::ifstream in(a.input);
    return json::parse(in, nullptr, false);
}

double parse_p(const std::string& p) {
    if (p == "1")
        return 1.0;
    if (p == "2")
        return 2.0;
    if (p == "inf")
        return std::numeric_limits<double>::infinity();
    throw UsageError("--p must be 1, 2 or inf");
}

/// The machine report is the model itself plus a "report" member, so it
/// reloads as a model file.
void write_json(const Args& a, const std::optional<io::Model>& model, json report) {
    if (a.json_out.empty())
        return;
    json j = model ? io::to_json(*model) : json::object();
    j["report"] = std::move(report);
    std::ofstream out(a.json_out);
    if (!out)
        throw std::runtime_error("cannot write " + a.json_out);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_stability(const Args& a) {
    const io::Model model = load(a);
    const auto& sys = expect<PositiveStateSpace>(model, "stability");
    const bool cont = sys.domain == TimeDomain::continuous;
    const StabilityResult primal = cont ? continuous_certificate(sys.A) : discrete_certificate(sys.A);
    const char* verdict = primal.verdict == Verdict::feasible     ? "stable (certificate found)"
                          : primal.verdict == Verdict::marginal ? "marginal (within 1e-7 of the boundary)"
                                                                  : "not stable (no certificate)";
    std::cout << "stability: " << verdict << '\n'
              << (cont ? "spectral abscissa " : "spectral radius ") << fmt(primal.spectrum) << '\n';
    json rep{{"verdict", primal.feasible() ? "feasible" : primal.verdict == Verdict::marginal ? "marginal" : "infeasible"},
             {"spectrum", primal.spectrum}};
    if (primal.certificate) {
        const RowReport rows = verify_rowwise(sys.A, *primal.certificate);
        std::cout << "xi = " << fmt(primal.certificate->values) << '\n';
        print_rows(rows);
        rep["xi"] = primal.certificate->values;
        rep["rows"] = rows_json(rows);
        const StabilityResult dual = cont ? continuous_dual_certificate(sys.A) : discrete_dual_certificate(sys.A);
        if (dual.certificate) {
            const StabilityCertificate P =
                diagonal_lyapunov(primal.certificate->values, dual.certificate->values, sys.domain);
            const double res = lyapunov_residual(sys.A, P.values, sys.domain);
            std::cout << "z = " << fmt(dual.certificate->values) << '\n'
                      << "diagonal P = " << fmt(P.values) << ", lambda_max of Lyapunov form " << fmt(res) << '\n';
            rep["z"] = dual.certificate->values;
            rep["P"] = P.values;
            rep["lyapunov_lambda_max"] = res;
        }
    }
    write_json(a, model, rep);
    return primal.feasible() ? kPositive : kNegative;
}

int cmd_norm(const Args& a) {
    const io::Model model = load(a);
    const auto& sys = expect<PositiveStateSpace>(model, "norm");
    sys.validate();
    const double p = parse_p(a.p);
    if (!is_stable(sys)) {
        std::cout << "norm: system is not stable; induced norms are unbounded\n";
        write_json(a, model, {{"stable", false}});
        return kNegative;
    }
    const Matrix G = static_gain(sys);
    const double value = induced_norm(sys, p);
    print_matrix("static gain G(0)", G);
    std::cout << a.p << "-induced norm = " << fmt(value) << '\n';
    write_json(a, model, {{"stable", true}, {"p", a.p}, {"norm", value}, {"static_gain", io::write_matrix(G)}});
    return kPositive;
}

int cmd_certify(const Args& a) {
    const io::Model model = load(a);
    const auto& sys = expect<PositiveStateSpace>(model, "certify");
    sys.validate();
    if (a.p != "1" && a.p != "inf")
        throw UsageError("certify: --p must be 1 or inf");
    const Direction dir = a.p == "1" ? Direction::l1 : Direction::linf;
    if (!a.gamma)
        throw UsageError("certify: --gamma is required");
    const auto cert = performance_certificate(sys, dir, *a.gamma);
    json rep{{"p", a.p}, {"gamma", *a.gamma}, {"feasible", cert.has_value()}};
    if (!cert) {
        std::cout << "certify: no certificate for gamma " << fmt(*a.gamma) << " (" << a.p << "-induced)\n";
        write_json(a, model, rep);
        return kNegative;
    }
    const RowReport rows = certificate_rows(sys, *cert);
    std::cout << "certify: " << a.p << "-induced norm < " << fmt(*a.gamma) << " certified\n"
              << (dir == Direction::linf ? "xi = " : "p = ") << fmt(cert->vector) << '\n';
    print_rows(rows);
    rep["vector"] = cert->vector;
    rep["rows"] = rows_json(rows);
    write_json(a, model, rep);
    return rows.pass ? kPositive : kNegative;
}

json synthesis_report(const SynthesisProblem& prob, const std::optional<SynthesisResult>& res,
                      const std::vector<std::string>& names) {
    if (!res) {
        std::cout << "synthesis: infeasible\n";
        return {{"feasible", false}};
    }
    const SynthesisReport check = verify_synthesis(prob, *res);
    std::cout << "synthesis: feasible\n"
              << "gamma (LP optimum) = " << fmt(res->gamma) << ", certified bound " << fmt(res->certificate.gamma)
              << '\n';
    json gains = json::array();
    for (std::size_t k = 0; k < res->L.rows(); ++k) {
        const std::string name = k < names.size() ? names[k] : "L" + std::to_string(k + 1);
        std::cout << "  " << name << " = " << fmt(res->L(k, k)) << '\n';
        gains.push_back({{"name", name}, {"value", res->L(k, k)}});
    }
    std::cout << (prob.direction == Direction::linf ? "xi = " : "p = ") << fmt(res->certificate.vector) << '\n'
              << "verification: " << (check.pass ? "pass" : "FAIL") << ", achieved norm " << fmt(check.achieved_norm)
              << ", closed-loop spectrum " << fmt(check.spectrum) << '\n';
    for (const auto& f : check.failures)
        std::cout << "  " << f << '\n';
    return {{"feasible", true},
            {"gamma", res->gamma},
            {"certified_gamma", res->certificate.gamma},
            {"gains", gains},
            {"certificate", res->certificate.vector},
            {"verified", check.pass},
            {"achieved_norm", check.achieved_norm},
            {"spectrum", check.spectrum}};
}

int cmd_synthesize(const Args& a) {
    const io::Model model = load(a);
    const auto& prob = expect<SynthesisProblem>(model, "synthesize");
    std::vector<std::string> names;
    if (const json raw = load_raw(a); raw.is_object() && raw.contains("gains") && raw["gains"].is_array())
        for (const auto& g : raw["gains"])
            if (g.is_string())
                names.push_back(g.get<std::string>());
    SynthesisOptions opt;
    opt.gamma = a.gamma;
    const auto res = synthesize(prob, opt);
    const json rep = synthesis_report(prob, res, names);
    write_json(a, model, rep);
    return res && rep["verified"].get<bool>() ? kPositive : kNegative;
}

json dominated_report(const DominatedSynthesisProblem& p) {
    const HypothesisReport hyp = check_dominated_hypotheses(p);
    std::cout << "hypotheses: " << (hyp.pass ? "satisfied" : "violated") << '\n';
    for (const auto& s : hyp.issues)
        std::cout << "  " << s << '\n';
    json rep{{"hypotheses", hyp.pass}, {"issues", hyp.issues}};
    if (!hyp.pass)
        return rep;
    const auto res = synthesize_dominated(p);
    rep["feasible"] = res.has_value();
    if (!res) {
        std::cout << "synthesis: infeasible\n";
        return rep;
    }
    const RationalTransferMatrix cl = dominated_closed_loop(p, res->L);
    const Matrix G0 = cl.static_gain();
    const bool dom = matrix_dominated(cl);
    std::cout << "gamma = " << fmt(res->gamma) << '\n' << "gains = " << fmt(res->L.diag()) << '\n';
    print_matrix("closed-loop G(0)", G0);
    std::cout << "closed loop positively dominated: " << (dom ? "yes" : "no") << '\n';
    rep["gamma"] = res->gamma;
    rep["gains"] = res->L.diag();
    rep["closed_loop_gain"] = io::write_matrix(G0);
    rep["closed_loop_dominated"] = dom;
    return rep;
}

int cmd_dominance(const Args& a) {
    const io::Model model = load(a);
    const auto& tm = expect<io::TransferModel>(model, "dominance");
    json rep = json::object();
    bool positive = true;
    if (tm.G.rows() > 0) {
        json entries = json::array();
        for (std::size_t i = 0; i < tm.G.rows(); ++i)
            for (std::size_t j = 0; j < tm.G.cols(); ++j) {
                const DominanceResult d = dominance_test(tm.G(i, j));
                std::cout << "G(" << i + 1 << "," << j + 1 << "): " << (d.dominated ? "dominated" : "not dominated");
                json e{{"row", i + 1}, {"col", j + 1}, {"dominated", d.dominated}};
                if (d.witness_omega) {
                    std::cout << ", |G(iw)| > G(0) at w = " << fmt(*d.witness_omega);
                    e["witness_omega"] = *d.witness_omega;
                }
                std::cout << '\n';
                entries.push_back(e);
                positive = positive && d.dominated;
            }
        std::cout << "transfer matrix " << (positive ? "is" : "is not") << " positively dominated\n";
        rep["entries"] = entries;
        rep["dominated"] = positive;
        if (positive) {
            const double h = hinf_norm_dominated(tm.G);
            std::cout << "H-infinity norm = sigma_max(G(0)) = " << fmt(h) << '\n';
            rep["hinf_norm"] = h;
        }
    }
    if (tm.synthesis) {
        rep["synthesis"] = dominated_report(*tm.synthesis);
        positive = positive && rep["synthesis"].value("feasible", false);
    }
    write_json(a, model, rep);
    return positive ? kPositive : kNegative;
}

std::string kyp_summary(const KypVerdict& v, TimeDomain domain) {
    const Condition c[4] = {v.cond1, v.cond2, v.cond3, v.cond4};
    std::string holds, fails, unknown;
    for (int i = 0; i < 4; ++i) {
        std::string& s = c[i] == Condition::holds ? holds : c[i] == Condition::fails ? fails : unknown;
        s += (s.empty() ? "" : ",") + std::to_string(i + 1);
    }
    std::string out;
    auto part = [&out](const std::string& ids, const char* word_one, const char* word_many) {
        if (ids.empty())
            return;
        if (!out.empty())
            out += "; ";
        const bool many = ids.find(',') != std::string::npos;
        out += (many ? "conditions " : "") + ids + " " + (many ? word_many : word_one);
    };
    part(holds, "holds", "hold");
    part(fails, "infeasible", "infeasible");
    part(unknown, "undecided", "undecided");
    if (!v.stabilizable)
        out += domain == TimeDomain::continuous ? "; (-A,B) not stabilizable" : "; (A,B) not anti-stabilizable";
    // A lone id in the first slot reads better with the word "condition".
    if (!out.empty() && std::isdigit(static_cast<unsigned char>(out[0])))
        out = "condition " + out;
    return out;
}

int cmd_kyp(const Args& a) {
    const io::Model model = load(a);
    const auto& inst = expect<KypInstance>(model, "kyp");
    KypOptions opt;
    opt.grid = default_frequency_grid(inst.domain, a.grid);
    if (a.tol)
        opt.static_tol = *a.tol;
    const KypVerdict v = kyp_verdict(inst, opt);
    std::cout << "kyp: " << kyp_summary(v, inst.domain) << '\n'
              << "  (1) frequency condition: " << to_string(v.cond1) << '\n'
              << "  (2) static condition:    " << to_string(v.cond2) << ", lambda_max " << fmt(v.static_lambda)
              << '\n'
              << "  (3) diagonal P:          " << to_string(v.cond3) << ", lambda_max " << fmt(v.cond3_lambda)
              << '\n'
              << "  (4) linear program:      " << to_string(v.cond4) << '\n';
    json rep{{"cond1", to_string(v.cond1)},       {"cond2", to_string(v.cond2)},
             {"cond3", to_string(v.cond3)},       {"cond4", to_string(v.cond4)},
             {"stabilizable", v.stabilizable},    {"static_lambda", v.static_lambda},
             {"cond3_lambda", v.cond3_lambda},    {"summary", kyp_summary(v, inst.domain)}};
    if (v.P) {
        std::cout << "  P = diag" << fmt(*v.P) << '\n';
        rep["P"] = *v.P;
    }
    if (v.lp_witness) {
        std::cout << "  x = " << fmt(v.lp_witness->x) << ", u = " << fmt(v.lp_witness->u)
                  << ", p = " << fmt(v.lp_witness->p) << '\n';
        rep["x"] = v.lp_witness->x;
        rep["u"] = v.lp_witness->u;
        rep["p"] = v.lp_witness->p;
    }
    if (!v.stabilizable && !v.all_agree())
        std::cout << "  theorem hypotheses unmet: the equivalence is not guaranteed\n";
    write_json(a, model, rep);
    return v.cond2 == Condition::holds ? kPositive : kNegative;
}

int cmd_decompose(const Args& a) {
    const io::Model model = load(a);
    Matrix M;
    if (const auto* q = std::get_if<PqpInstance>(&model))
        M = q->M0;
    else
        M = expect<PositiveStateSpace>(model, "decompose").A;
    if (!is_symmetric(M) || !is_metzler(M) || max_eigenvalue(M) > 1e-9) {
        std::cout << "decompose: matrix is not a negative semidefinite symmetric Metzler matrix\n";
        write_json(a, model, {{"decomposed", false}});
        return kNegative;
    }
    const NsdDecomposition d = nsd_decompose(M);
    json blocks = json::array();
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& b : d.blocks) {
        const double lam = max_eigenvalue(b.N);
        worst = std::max(worst, lam);
        std::cout << "block (" << b.k + 1 << "," << b.l + 1 << "): [[" << fmt(b.N(0, 0)) << ", " << fmt(b.N(0, 1))
                  << "], [" << fmt(b.N(1, 0)) << ", " << fmt(b.N(1, 1)) << "]], lambda_max " << fmt(lam) << '\n';
        blocks.push_back({{"k", b.k + 1}, {"l", b.l + 1}, {"N", io::write_matrix(b.N)}, {"lambda_max", lam}});
    }
    for (auto [i, v] : d.isolated)
        std::cout << "isolated (" << i + 1 << "): " << fmt(v) << '\n';
    const double err = norm_inf(d.reconstruct(M.rows()) - M);
    std::cout << d.blocks.size() << " edge blocks, reconstruction error " << fmt(err) << '\n';
    write_json(a, model, {{"decomposed", true}, {"blocks", blocks}, {"reconstruction_error", err}});
    return kPositive;
}

int cmd_pqp(const Args& a) {
    const io::Model model = load(a);
    const auto& inst = expect<PqpInstance>(model, "pqp");
    if (!pqp_slater_point(inst)) {
        std::cout << "pqp: no strictly feasible point; duality is not guaranteed\n";
        write_json(a, model, {{"slater", false}});
        return kNegative;
    }
    const PqpPrimalResult primal = pqp_primal(inst, a.tol.value_or(1e-10));
    const PqpDualResult dual = pqp_dual(inst);
    const double gap = std::abs(primal.value - dual.value);
    std::cout << "primal value = " << fmt(primal.value) << " at x = " << fmt(primal.x) << '\n'
              << "dual value   = " << fmt(dual.value) << " at tau = " << fmt(dual.tau) << " (" << dual.cuts
              << " cuts)\n"
              << "gap = " << fmt(gap) << '\n';
    write_json(a, model,
               {{"slater", true},
                {"primal", primal.value},
                {"x", primal.x},
                {"dual", dual.value},
                {"tau", dual.tau},
                {"cuts", dual.cuts},
                {"gap", gap}});
    return gap <= 1e-4 * std::max(1.0, std::abs(primal.value)) ? kPositive : kNegative;
}

int cmd_dist_verify(const Args& a) {
    const io::Model model = load(a);
    const auto& sys = expect<PositiveStateSpace>(model, "dist-verify");
    Vector xi;
    if (const json raw = load_raw(a); raw.is_object() && raw.contains("xi")) {
        xi = io::read_vector(raw["xi"], "/xi");
    } else {
        const StabilityResult r = continuous_certificate(sys.A);
        if (!r.certificate) {
            std::cout << "dist-verify: no \"xi\" given and no centralized certificate exists\n";
            write_json(a, model, {{"pass", false}});
            return kNegative;
        }
        xi = r.certificate->values;
        std::cout << "using centralized certificate xi = " << fmt(xi) << '\n';
    }
    const DistributedReport rep = distributed_verify(sys.A, xi);
    json nodes = json::array();
    for (const auto& n : rep.nodes) {
        std::cout << "  node " << n.node + 1 << ": slack " << fmt(n.slack) << (n.pass ? "  ok" : "  FAIL") << '\n';
        nodes.push_back({{"node", n.node + 1}, {"slack", n.slack}, {"pass", n.pass}});
    }
    std::cout << "verdict: " << (rep.pass ? "pass" : "fail") << ", " << rep.messages << " messages, "
              << rep.audit.violations << " non-neighbor reads\n";
    write_json(a, model,
               {{"pass", rep.pass}, {"xi", xi}, {"nodes", nodes}, {"messages", rep.messages},
                {"audit_violations", rep.audit.violations}});
    return rep.pass ? kPositive : kNegative;
}

int cmd_dist_certify(const Args& a) {
    const io::Model model = load(a);
    const auto& sys = expect<PositiveStateSpace>(model, "dist-certify");
    DistributedOptions opt;
    opt.step = a.step;
    opt.max_rounds = a.max_rounds;
    if (a.tol)
        opt.delta = *a.tol;
    std::ofstream trace;
    if (!a.trace.empty()) {
        trace.open(a.trace);
        if (!trace)
            throw std::runtime_error("cannot write " + a.trace);
        opt.trace = [&trace](const TraceRecord& r) { trace << to_json_line(r) << '\n'; };
    }
    const DistributedCertificate c = distributed_certificate(sys.A, opt);
    json rep{{"converged", c.converged},
             {"rounds", c.rounds},
             {"messages", c.messages},
             {"messages_per_round", c.messages_per_round},
             {"audit_violations", c.audit.violations}};
    if (c.converged) {
        const RowReport rows = verify_rowwise(sys.A, {CertificateKind::primal_xi, c.xi, 0.0, TimeDomain::continuous});
        std::cout << "dist-certify: converged after " << c.rounds << " rounds\n" << "xi = " << fmt(c.xi) << '\n';
        print_rows(rows);
        std::cout << "centralized check: " << (rows.pass ? "pass" : "FAIL") << '\n';
        rep["xi"] = c.xi;
        rep["centralized_pass"] = rows.pass;
    } else {
        std::cout << "dist-certify: no certificate after " << c.rounds << " rounds\n";
    }
    std::cout << c.messages_per_round << " messages per round, " << c.messages << " total, " << c.audit.violations
              << " non-neighbor reads\n";
    write_json(a, model, rep);
    return c.converged ? kPositive : kNegative;
}

// ---------------------------------------------------------------------------
// Demos

void delta_line(const char* what, double got, double want, double tol) {
    const bool ok = std::abs(got - want) <= tol;
    std::cout << "  " << what << ": got " << fmt(got) << ", reference " << fmt(want) << ", delta "
              << fmt(std::abs(got - want)) << (ok ? "  PASS" : "  FAIL") << '\n';
}

int demo_transport(const Args& a) {
    const SynthesisProblem prob = demos::transport_synthesis();
    std::cout << "transport network: gains l12, l32, l23 in [0,1]\n";
    const auto res = synthesize(prob);
    json rep = synthesis_report(prob, res, demos::transport_gain_names());
    bool ok = res.has_value() && rep["verified"].get<bool>();
    if (res) {
        const PositiveStateSpace cl = closed_loop(prob, res->L);
        const DistributedReport dist = distributed_verify(cl.A, res->certificate.vector);
        std::cout << "distributed verification: " << (dist.pass ? "pass" : "fail") << " (" << dist.messages
                  << " messages)\n";
        const Vector reference_xi{0.5, 0.5, 1.69, 0.87}, reference_mu{0.5, 0.5, 0.0};
        const RowReport pt = synthesis_rows(prob, reference_xi, reference_mu, 0.0);
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < prob.states(); ++r)
            worst = std::min(worst, pt.rows[r].slack);
        std::cout << "reference point xi = (0.5, 0.5, 1.69, 0.87), mu = (0.5, 0.5, 0): "
                  << (pt.pass ? "feasible" : "infeasible") << ", smallest slack " << fmt(worst) << '\n';
        const Vector den = prob.F * reference_xi;
        Vector gains(reference_mu.size());
        for (std::size_t k = 0; k < gains.size(); ++k)
            gains[k] = reference_mu[k] / den[k];
        std::cout << "gains recovered from the reference point " << fmt(gains) << '\n';
        rep["reference_point_gains"] = gains;
        rep["distributed_pass"] = dist.pass;
        rep["reference_point_feasible"] = pt.pass;
        ok = ok && dist.pass;
    }
    write_json(a, io::Model{prob}, rep);
    return ok ? kPositive : kNegative;
}

int demo_formation(const Args& a, demos::FormationCase c) {
    const SynthesisProblem prob = demos::formation_synthesis(c);
    const demos::FormationReference ref = demos::formation_reference(c);
    std::cout << "vehicle formation, disturbance pattern B = " << fmt(prob.B.col(0)) << '\n';
    const auto res = synthesize(prob);
    json rep = synthesis_report(prob, res, demos::formation_gain_names());
    bool ok = res.has_value() && rep["verified"].get<bool>();
    if (res) {
        const double tol = c == demos::FormationCase::uniform ? 1e-6 : 1e-3;
        std::cout << "comparison with the published table:\n";
        delta_line("gamma", res->gamma, ref.gamma, tol);
        ok = ok && std::abs(res->gamma - ref.gamma) <= tol;
        std::cout << "  published gains " << fmt(ref.gains) << ", computed " << fmt(res->L.diag())
                  << " (optimal gains need not be unique)\n";
        rep["reference_gamma"] = ref.gamma;
        rep["reference_gains"] = ref.gains;
    }
    write_json(a, io::Model{prob}, rep);
    return ok ? kPositive : kNegative;
}

int demo_inertial(const Args& a) {
    const InertialFormation f = inertial_formation(4);
    std::cout << "inertial formation, 4 vehicles, unit stiffness, gains in [0,1]\n";
    const json rep = dominated_report(f.problem);
    io::TransferModel tm;
    tm.synthesis = f.problem;
    write_json(a, io::Model{tm}, rep);
    return rep.value("feasible", false) && rep.value("closed_loop_dominated", false) ? kPositive : kNegative;
}

int demo_power(const Args& a, const demos::PowerNetwork& net, std::optional<double> closed_form) {
    std::cout << "power flow: " << net.nodes.size() << " nodes, " << net.lines.size()
              << " lines (artifact default parameters)\n";
    const demos::PowerFlowReport r = demos::power_flow(net);
    std::cout << "primal loss = " << fmt(r.primal_loss) << ", dual loss = " << fmt(r.dual_loss) << ", gap "
              << fmt(r.gap()) << (r.gap() <= 1e-3 ? "  PASS" : "  FAIL") << '\n'
              << "voltages = " << fmt(r.voltages) << '\n';
    for (std::size_t k = 0; k < r.tau.size(); ++k)
        if (r.tau[k] > 1e-9)
            std::cout << "  active " << r.labels[k] << ": tau = " << fmt(r.tau[k]) << '\n';
    bool ok = r.gap() <= 1e-3;
    json rep{{"primal_loss", r.primal_loss}, {"dual_loss", r.dual_loss}, {"gap", r.gap()},
             {"voltages", r.voltages},       {"tau", r.tau},             {"constraints", r.labels}};
    if (closed_form) {
        delta_line("closed-form loss", r.primal_loss, *closed_form, 1e-6);
        ok = ok && std::abs(r.primal_loss - *closed_form) <= 1e-6;
        rep["closed_form"] = *closed_form;
    }
    write_json(a, io::Model{net}, rep);
    return ok ? kPositive : kNegative;
}

int cmd_demo(const Args& a) {
    const std::string& p = a.preset;
    if (p == "transport")
        return demo_transport(a);
    if (p == "formation1")
        return demo_formation(a, demos::FormationCase::uniform);
    if (p == "formation2")
        return demo_formation(a, demos::FormationCase::front_heavy);
    if (p == "formation3")
        return demo_formation(a, demos::FormationCase::rear_heavy);
    if (p == "inertial")
        return demo_inertial(a);
    if (p == "power") {
        if (!a.input.empty())
            return demo_power(a, expect<demos::PowerNetwork>(load(a), "demo power"), std::nullopt);
        return demo_power(a, demos::default_power_network(), std::nullopt);
    }
    if (p == "two-node")
        return demo_power(a, demos::two_node_network(), demos::two_node_loss(0.3, 0.1, 1.1));
    throw UsageError("unknown preset \"" + p + "\"");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certificates, synthesis and verification for positive linear systems"};
    app.require_subcommand(1);
    Args a;

    auto add_io = [&a](CLI::App* sub) {
        sub->add_option("--input", a.input, "model file (JSON)");
        sub->add_option("--json", a.json_out, "machine-readable report");
    };
    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const Args&);
    };
    const Cmd cmds[] = {
        {"stability", "linear stability certificate and diagonal Lyapunov matrix", cmd_stability},
        {"norm", "induced norm from the static gain", cmd_norm},
        {"certify", "performance certificate for a given gamma", cmd_certify},
        {"synthesize", "structured gain synthesis by linear programming", cmd_synthesize},
        {"dominance", "positive dominance of a rational transfer matrix", cmd_dominance},
        {"kyp", "the four conditions of the positive KYP lemma", cmd_kyp},
        {"decompose", "edge-local decomposition of an NSD symmetric Metzler matrix", cmd_decompose},
        {"pqp", "positive quadratic program: primal and dual", cmd_pqp},
        {"dist-verify", "per-node certificate verification by message passing", cmd_dist_verify},
        {"dist-certify", "distributed certificate computation", cmd_dist_certify},
        {"demo", "built-in examples", cmd_demo},
    };
    std::vector<std::pair<CLI::App*, int (*)(const Args&)>> subs;
    for (const Cmd& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_io(sub);
        subs.emplace_back(sub, c.run);
    }
    auto* certify = app.get_subcommand("certify");
    auto* synth = app.get_subcommand("synthesize");
    certify->add_option("--gamma", a.gamma, "gain bound to certify");
    synth->add_option("--gamma", a.gamma, "fixed gain bound instead of minimizing");
    for (const char* name : {"norm", "certify"})
        app.get_subcommand(name)->add_option("--p", a.p, "1, 2 or inf")->check(CLI::IsMember({"1", "2", "inf"}));
    app.get_subcommand("kyp")->add_option("--grid", a.grid, "frequency grid points")->check(CLI::PositiveNumber);
    for (const char* name : {"kyp", "pqp", "dist-certify"})
        app.get_subcommand(name)->add_option("--tol", a.tol, "tolerance override");
    auto* dc = app.get_subcommand("dist-certify");
    dc->add_option("--max-rounds", a.max_rounds, "round limit");
    dc->add_option("--step", a.step, "Euler step (0 = automatic)");
    dc->add_option("--trace", a.trace, "line-delimited JSON trace file");
    app.get_subcommand("demo")
        ->add_option("--preset", a.preset, "transport, formation1, formation2, formation3, inertial, power, two-node")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPositive : kFailure;
    }
    try {
        for (auto [sub, run] : subs)
            if (sub->parsed())
                return run(a);
    } catch (const io::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kFailure;
}
