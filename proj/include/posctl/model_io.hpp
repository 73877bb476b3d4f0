#pragma once

/**
 * @file model_io.hpp
 * @brief JSON model files. Requires nlohmann_json.
 *
 * Every file is an object with a "kind" member. Matrices are dense row-major
 * nested arrays, rationals are {"num": [...], "den": [...]} with ascending
 * coefficients, and node indices in power networks are 1-based. Doubles are
 * written in shortest round-trip form, so a written model reloads bit-exactly.
 */

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "demos.hpp"
#include "kyp.hpp"
#include "linalg.hpp"
#include "performance.hpp"
#include "posdom.hpp"
#include "pqp.hpp"
#include "synthesis.hpp"

namespace posctl::io {

using nlohmann::json;

/// Schema violation; the message names the offending field path.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw SchemaError((path.empty() ? std::string("/") : path) + ": " + what);
}

inline const json& member(const json& j, const std::string& path, const char* key) {
    if (!j.is_object())
        fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end())
        fail(path + "/" + key, "missing required field");
    return *it;
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number())
        fail(path, "expected a number");
    return j.get<double>();
}

}  // namespace detail

[[nodiscard]] inline Vector read_vector(const json& j, const std::string& path) {
    if (!j.is_array())
        detail::fail(path, "expected an array of numbers");
    Vector v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(detail::number(j[i], path + "/" + std::to_string(i)));
    return v;
}

/// Nested row-major array; an empty array gives a 0 x cols matrix.
[[nodiscard]] inline Matrix read_matrix(const json& j, const std::string& path, std::size_t empty_cols = 0) {
    if (!j.is_array())
        detail::fail(path, "expected a matrix (array of rows)");
    if (j.empty())
        return Matrix(0, empty_cols);
    const std::size_t rows = j.size();
    if (!j[0].is_array())
        detail::fail(path + "/0", "expected a row array");
    const std::size_t cols = j[0].size();
    Matrix M(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string rp = path + "/" + std::to_string(r);
        if (!j[r].is_array() || j[r].size() != cols)
            detail::fail(rp, "row length differs from the first row (" + std::to_string(cols) + ")");
        for (std::size_t c = 0; c < cols; ++c)
            M(r, c) = detail::number(j[r][c], rp + "/" + std::to_string(c));
    }
    return M;
}

[[nodiscard]] inline json write_matrix(const Matrix& M) {
    json rows = json::array();
    for (std::size_t r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < M.cols(); ++c)
            row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

[[nodiscard]] inline RationalFunction read_rational(const json& j, const std::string& path) {
    if (j.is_number())
        return RationalFunction::constant(j.get<double>());
    const Vector num = read_vector(detail::member(j, path, "num"), path + "/num");
    const Vector den = read_vector(detail::member(j, path, "den"), path + "/den");
    try {
        return RationalFunction(Polynomial(num), Polynomial(den));
    } catch (const std::exception& e) {
        detail::fail(path, e.what());
    }
}

[[nodiscard]] inline json write_rational(const RationalFunction& f) {
    return json{{"num", f.num().coeffs()}, {"den", f.den().coeffs()}};
}

[[nodiscard]] inline RationalTransferMatrix read_transfer_matrix(const json& j, const std::string& path,
                                                                 std::size_t empty_cols = 0) {
    if (!j.is_array())
        detail::fail(path, "expected a matrix of rationals");
    if (j.empty())
        return RationalTransferMatrix(0, empty_cols);
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    RationalTransferMatrix G(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string rp = path + "/" + std::to_string(r);
        if (!j[r].is_array() || j[r].size() != cols)
            detail::fail(rp, "row length differs from the first row");
        for (std::size_t c = 0; c < cols; ++c)
            G(r, c) = read_rational(j[r][c], rp + "/" + std::to_string(c));
    }
    return G;
}

[[nodiscard]] inline json write_transfer_matrix(const RationalTransferMatrix& G) {
    json rows = json::array();
    for (std::size_t r = 0; r < G.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < G.cols(); ++c)
            row.push_back(write_rational(G(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

[[nodiscard]] inline TimeDomain read_domain(const json& j, const std::string& path) {
    const auto it = j.find("time_domain");
    if (it == j.end())
        return TimeDomain::continuous;
    if (!it->is_string())
        detail::fail(path + "/time_domain", "expected \"continuous\" or \"discrete\"");
    const std::string s = it->get<std::string>();
    if (s == "continuous")
        return TimeDomain::continuous;
    if (s == "discrete")
        return TimeDomain::discrete;
    detail::fail(path + "/time_domain", "expected \"continuous\" or \"discrete\", got \"" + s + "\"");
}

[[nodiscard]] inline const char* domain_name(TimeDomain d) {
    return d == TimeDomain::continuous ? "continuous" : "discrete";
}

/// Dominated interconnection blocks; `G` alone is used by the dominance command.
struct TransferModel {
    RationalTransferMatrix G;
    std::optional<DominatedSynthesisProblem> synthesis;
};

using Model = std::variant<PositiveStateSpace, SynthesisProblem, TransferModel, KypInstance, PqpInstance,
                           demos::PowerNetwork>;

[[nodiscard]] inline const char* kind_name(const Model& m) {
    static constexpr const char* names[] = {"state_space", "synthesis", "transfer_matrix",
                                            "kyp",         "pqp",       "power_network"};
    return names[m.index()];
}

namespace detail {

inline Matrix optional_matrix(const json& j, const std::string& path, const char* key, std::size_t rows,
                              std::size_t cols) {
    const auto it = j.find(key);
    if (it == j.end())
        return Matrix(rows, cols);
    Matrix M = read_matrix(*it, path + "/" + key, cols);
    if (M.rows() == 0)
        M = Matrix(rows, cols);
    if (M.rows() != rows || M.cols() != cols)
        fail(path + "/" + key, "expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                                   std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
    return M;
}

inline std::size_t cols_of(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_array() || it->empty() || !(*it)[0].is_array())
        return 0;
    return (*it)[0].size();
}

inline std::size_t rows_of(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() || !it->is_array() ? 0 : it->size();
}

inline PositiveStateSpace read_state_space(const json& j) {
    PositiveStateSpace s;
    s.A = read_matrix(member(j, "", "A"), "/A");
    if (!s.A.is_square())
        fail("/A", "matrix must be square");
    const std::size_t n = s.A.rows();
    const std::size_t m = cols_of(j, "B"), q = rows_of(j, "C");
    s.B = optional_matrix(j, "", "B", n, m);
    s.C = optional_matrix(j, "", "C", q, n);
    s.D = optional_matrix(j, "", "D", q, m);
    s.domain = read_domain(j, "");
    return s;
}

inline SynthesisProblem read_synthesis(const json& j) {
    SynthesisProblem p;
    p.A = read_matrix(member(j, "", "A"), "/A");
    if (!p.A.is_square())
        fail("/A", "matrix must be square");
    const std::size_t n = p.A.rows();
    const std::size_t k = cols_of(j, "B"), l = rows_of(j, "C"), m = cols_of(j, "E");
    p.B = optional_matrix(j, "", "B", n, k);
    p.C = optional_matrix(j, "", "C", l, n);
    p.D = optional_matrix(j, "", "D", l, k);
    p.E = optional_matrix(j, "", "E", n, m);
    p.F = optional_matrix(j, "", "F", m, n);
    p.G = optional_matrix(j, "", "G", l, m);
    p.H = optional_matrix(j, "", "H", m, k);
    p.domain = read_domain(j, "");
    if (const auto it = j.find("direction"); it != j.end()) {
        const std::string d = it->is_string() ? it->get<std::string>() : "";
        if (d == "linf")
            p.direction = Direction::linf;
        else if (d == "l1")
            p.direction = Direction::l1;
        else
            fail("/direction", "expected \"linf\" or \"l1\"");
    }
    if (const auto it = j.find("bounds"); it != j.end()) {
        p.bounds = read_vector(*it, "/bounds");
        if (p.bounds.size() != m)
            fail("/bounds", "expected one bound per gain (" + std::to_string(m) + ")");
    }
    if (const auto it = j.find("unbounded"); it != j.end()) {
        if (!it->is_array() || it->size() != m)
            fail("/unbounded", "expected one boolean per gain");
        for (std::size_t i = 0; i < m; ++i) {
            if (!(*it)[i].is_boolean())
                fail("/unbounded/" + std::to_string(i), "expected a boolean");
            p.unbounded.push_back((*it)[i].get<bool>());
        }
    }
    try {
        p.validate_dimensions();
    } catch (const std::exception& e) {
        fail("", e.what());
    }
    return p;
}

inline TransferModel read_transfer(const json& j) {
    TransferModel t;
    if (j.contains("G"))
        t.G = read_transfer_matrix(j["G"], "/G");
    if (j.contains("E")) {
        DominatedSynthesisProblem p;
        p.A = read_transfer_matrix(member(j, "", "A"), "/A");
        const std::size_t n = p.A.rows();
        p.E = read_transfer_matrix(member(j, "", "E"), "/E");
        p.F = read_transfer_matrix(member(j, "", "F"), "/F", n);
        p.B = read_transfer_matrix(member(j, "", "B"), "/B");
        p.C = read_transfer_matrix(member(j, "", "C"), "/C", n);
        p.D = j.contains("D") ? read_transfer_matrix(j["D"], "/D") : RationalTransferMatrix(p.C.rows(), p.B.cols());
        if (const auto it = j.find("bounds"); it != j.end())
            p.bounds = read_vector(*it, "/bounds");
        t.synthesis = std::move(p);
    }
    if (!j.contains("G") && !t.synthesis)
        fail("", "transfer_matrix needs \"G\" or the blocks A, B, C, E, F");
    return t;
}

inline KypInstance read_kyp(const json& j) {
    KypInstance k;
    k.A = read_matrix(member(j, "", "A"), "/A");
    k.B = read_matrix(member(j, "", "B"), "/B", 0);
    if (k.B.rows() == 0)
        k.B = Matrix(k.A.rows(), 0);
    k.Q = read_matrix(member(j, "", "Q"), "/Q");
    k.domain = read_domain(j, "");
    try {
        k.validate_dimensions();
    } catch (const std::exception& e) {
        fail("", e.what());
    }
    return k;
}

inline PqpInstance read_pqp(const json& j) {
    PqpInstance p;
    p.M0 = read_matrix(member(j, "", "M0"), "/M0");
    if (const auto it = j.find("M"); it != j.end()) {
        if (!it->is_array())
            fail("/M", "expected an array of matrices");
        for (std::size_t k = 0; k < it->size(); ++k)
            p.M.push_back(read_matrix((*it)[k], "/M/" + std::to_string(k)));
    }
    if (const auto it = j.find("b"); it != j.end())
        p.b = read_vector(*it, "/b");
    try {
        p.validate();
    } catch (const std::exception& e) {
        fail("", e.what());
    }
    return p;
}

inline demos::PowerNetwork read_power(const json& j) {
    demos::PowerNetwork net;
    const json& nodes = member(j, "", "nodes");
    if (!nodes.is_array())
        fail("/nodes", "expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string p = "/nodes/" + std::to_string(i);
        demos::PowerNode nd;
        nd.p_max = number(member(nodes[i], p, "p_max"), p + "/p_max");
        nd.v_min = number(member(nodes[i], p, "v_min"), p + "/v_min");
        nd.v_max = number(member(nodes[i], p, "v_max"), p + "/v_max");
        net.nodes.push_back(nd);
    }
    const json& lines = member(j, "", "lines");
    if (!lines.is_array())
        fail("/lines", "expected an array");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string p = "/lines/" + std::to_string(i);
        demos::PowerLine l;
        const double from = number(member(lines[i], p, "from"), p + "/from");
        const double to = number(member(lines[i], p, "to"), p + "/to");
        if (from < 1 || to < 1 || from != std::floor(from) || to != std::floor(to))
            fail(p, "node indices are 1-based integers");
        l.from = static_cast<std::size_t>(from) - 1;
        l.to = static_cast<std::size_t>(to) - 1;
        l.R = number(member(lines[i], p, "R"), p + "/R");
        l.L = number(member(lines[i], p, "L"), p + "/L");
        l.capacity = number(member(lines[i], p, "capacity"), p + "/capacity");
        net.lines.push_back(l);
    }
    try {
        net.validate();
    } catch (const std::exception& e) {
        fail("", e.what());
    }
    return net;
}

}  // namespace detail

[[nodiscard]] inline Model parse_model(const json& j) {
    const json& kind = detail::member(j, "", "kind");
    if (!kind.is_string())
        detail::fail("/kind", "expected a string");
    const std::string k = kind.get<std::string>();
    if (k == "state_space")
        return detail::read_state_space(j);
    if (k == "synthesis")
        return detail::read_synthesis(j);
    if (k == "transfer_matrix")
        return detail::read_transfer(j);
    if (k == "kyp")
        return detail::read_kyp(j);
    if (k == "pqp")
        return detail::read_pqp(j);
    if (k == "power_network")
        return detail::read_power(j);
    detail::fail("/kind", "unknown kind \"" + k + "\"");
}

/// Parses text; syntax errors report the line and column.
[[nodiscard]] inline Model parse_model_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw SchemaError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": malformed JSON");
    }
    return parse_model(j);
}

[[nodiscard]] inline Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model_text(ss.str());
}

[[nodiscard]] inline json to_json(const Model& model) {
    json j;
    j["kind"] = kind_name(model);
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PositiveStateSpace>) {
                j["time_domain"] = domain_name(m.domain);
                j["A"] = write_matrix(m.A);
                j["B"] = write_matrix(m.B);
                j["C"] = write_matrix(m.C);
                j["D"] = write_matrix(m.D);
            } else if constexpr (std::is_same_v<T, SynthesisProblem>) {
                j["time_domain"] = domain_name(m.domain);
                j["direction"] = m.direction == Direction::linf ? "linf" : "l1";
                for (auto [name, M] : {std::pair{"A", &m.A}, {"B", &m.B}, {"C", &m.C}, {"D", &m.D}, {"E", &m.E},
                                       {"F", &m.F}, {"G", &m.G}, {"H", &m.H}})
                    j[name] = write_matrix(*M);
                if (!m.bounds.empty())
                    j["bounds"] = m.bounds;
                if (!m.unbounded.empty())
                    j["unbounded"] = m.unbounded;
            } else if constexpr (std::is_same_v<T, TransferModel>) {
                if (m.G.rows() > 0)
                    j["G"] = write_transfer_matrix(m.G);
                if (m.synthesis) {
                    const auto& p = *m.synthesis;
                    for (auto [name, M] : {std::pair{"A", &p.A}, {"B", &p.B}, {"C", &p.C}, {"D", &p.D},
                                           {"E", &p.E}, {"F", &p.F}})
                        j[name] = write_transfer_matrix(*M);
                    if (!p.bounds.empty())
                        j["bounds"] = p.bounds;
                }
            } else if constexpr (std::is_same_v<T, KypInstance>) {
                j["time_domain"] = domain_name(m.domain);
                j["A"] = write_matrix(m.A);
                j["B"] = write_matrix(m.B);
                j["Q"] = write_matrix(m.Q);
            } else if constexpr (std::is_same_v<T, PqpInstance>) {
                j["M0"] = write_matrix(m.M0);
                j["M"] = json::array();
                for (const auto& M : m.M)
                    j["M"].push_back(write_matrix(M));
                j["b"] = m.b;
            } else {
                j["nodes"] = json::array();
                for (const auto& nd : m.nodes)
                    j["nodes"].push_back({{"p_max", nd.p_max}, {"v_min", nd.v_min}, {"v_max", nd.v_max}});
                j["lines"] = json::array();
                for (const auto& l : m.lines)
                    j["lines"].push_back({{"from", l.from + 1},
                                          {"to", l.to + 1},
                                          {"R", l.R},
                                          {"L", l.L},
                                          {"capacity", l.capacity}});
            }
        },
        model);
    return j;
}

}  // namespace posctl::io
