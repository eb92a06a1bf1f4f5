#pragma once

// Problem-file ingestion. Problems are JSON documents with string-encoded
// exact rationals ("3/7", "1/2+1/3i") so no value passes through floating
// point:
//
// {
//   "dim": 1 | 2,
//   "operator": "a + b*z*Dz + z^3*Dz^2",
//   "params": {"a": "1", "b": "1"},
//   "m": 1,                              // 2D: number of initial conditions
//   "rhs": "1 + z^2",                    // solve only
//   "initial": ["z"],                    // 2D solve, length m
//   "moment_t": {"kind": "q_factorial", "q": "2"},
//   "moment_z": {"kind": "factorial"},
//   "s": "1/2",
//   "truncation": {"t": 8, "z": 30}
// }

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "formaut/moment.hpp"
#include "formaut/operators.hpp"
#include "formaut/parser.hpp"
#include "formaut/scalar.hpp"

namespace formaut {

struct ProblemError : std::runtime_error {
    explicit ProblemError(const std::string& what) : std::runtime_error(what) {}
};

struct ProblemSpec {
    int dim = 1;
    std::string operator_text;
    std::map<std::string, Scalar> params;
    std::optional<Operator1> op1;
    std::optional<Operator2> op2;
    std::optional<long> m;  // 2D: validated against the operator's principal t-order
    std::optional<std::string> rhs_text;
    std::vector<std::string> initial_texts;
    std::optional<MomentSequence> moment_t;
    std::optional<MomentSequence> moment_z;
    std::optional<Rational> s;
    long trunc_t = 8;
    long trunc_z = 16;
};

namespace detail {

inline MomentSequence parse_moment_descriptor(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind"))
        throw ProblemError(where + ": moment descriptor needs a \"kind\" field");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "factorial") return MomentSequence::factorial();
    if (kind == "gamma_over") {
        if (!j.contains("k")) throw ProblemError(where + ": gamma_over needs \"k\"");
        return MomentSequence::gamma_over(parse_rational(j.at("k").get<std::string>()));
    }
    if (kind == "q_factorial") {
        if (!j.contains("q")) throw ProblemError(where + ": q_factorial needs \"q\"");
        return MomentSequence::q_factorial(parse_rational(j.at("q").get<std::string>()));
    }
    if (kind == "table") {
        if (!j.contains("values")) throw ProblemError(where + ": table needs \"values\"");
        std::vector<Rational> values;
        for (const auto& v : j.at("values")) values.push_back(parse_rational(v.get<std::string>()));
        return MomentSequence::custom_table(std::move(values));
    }
    throw ProblemError(where + ": unknown moment kind '" + kind + "'");
}

}  // namespace detail

inline ProblemSpec parse_problem(const nlohmann::json& j) {
    ProblemSpec p;
    try {
        if (!j.is_object()) throw ProblemError("problem file must hold a JSON object");
        if (!j.contains("dim") || !j.at("dim").is_number_integer())
            throw ProblemError("\"dim\" must be 1 or 2");
        p.dim = j.at("dim").get<int>();
        if (p.dim != 1 && p.dim != 2) throw ProblemError("\"dim\" must be 1 or 2");
        if (!j.contains("operator")) throw ProblemError("missing \"operator\"");
        p.operator_text = j.at("operator").get<std::string>();

        if (j.contains("params")) {
            for (const auto& [name, value] : j.at("params").items())
                p.params.emplace(name, parse_scalar_literal(value.get<std::string>()));
        }
        if (j.contains("m")) p.m = j.at("m").get<long>();
        if (j.contains("rhs")) p.rhs_text = j.at("rhs").get<std::string>();
        if (j.contains("initial"))
            for (const auto& e : j.at("initial")) p.initial_texts.push_back(e.get<std::string>());
        if (j.contains("moment_t"))
            p.moment_t = detail::parse_moment_descriptor(j.at("moment_t"), "moment_t");
        if (j.contains("moment_z"))
            p.moment_z = detail::parse_moment_descriptor(j.at("moment_z"), "moment_z");
        if (j.contains("s")) {
            p.s = parse_rational(j.at("s").get<std::string>());
            if (*p.s < 0) throw ProblemError("\"s\" must be nonnegative");
        }
        if (j.contains("truncation")) {
            const auto& t = j.at("truncation");
            if (t.contains("t")) p.trunc_t = t.at("t").get<long>();
            if (t.contains("z")) p.trunc_z = t.at("z").get<long>();
            if (p.trunc_t < 0 || p.trunc_z < 0) throw ProblemError("truncations must be nonnegative");
        }

        if (p.dim == 1) {
            p.op1 = parse_operator1(p.operator_text, p.params);
            if (p.op1->empty()) throw ProblemError("operator is identically zero");
            if (p.op1->moment_z && !p.moment_z)
                throw ProblemError("operator uses Dmz but no \"moment_z\" descriptor is given");
            if (!p.op1->moment_z && p.moment_z &&
                p.moment_z->kind() != MomentSequence::Kind::Factorial)
                throw ProblemError("\"moment_z\" given but the operator uses classical Dz");
        } else {
            p.op2 = parse_operator2(p.operator_text, p.params);
            if (p.op2->empty()) throw ProblemError("operator is identically zero");
            if (p.op2->moment_t && !p.moment_t)
                throw ProblemError("operator uses Dmt but no \"moment_t\" descriptor is given");
            if (p.op2->moment_z && !p.moment_z)
                throw ProblemError("operator uses Dmz but no \"moment_z\" descriptor is given");
            if (!p.op2->moment_t && p.moment_t &&
                p.moment_t->kind() != MomentSequence::Kind::Factorial)
                throw ProblemError("\"moment_t\" given but the operator uses classical Dt");
            if (!p.op2->moment_z && p.moment_z &&
                p.moment_z->kind() != MomentSequence::Kind::Factorial)
                throw ProblemError("\"moment_z\" given but the operator uses classical Dz");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProblemError(std::string("malformed problem file: ") + e.what());
    }
    return p;
}

inline ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open problem file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ProblemError(std::string("JSON parse error in '") + path + "': " + e.what());
    }
    try {
        return parse_problem(j);
    } catch (const ParseError& e) {
        throw ProblemError(path + ": " + e.what());
    } catch (const ProblemError& e) {
        throw ProblemError(path + ": " + e.what());
    }
}

inline MomentSequence moment_or_factorial(const std::optional<MomentSequence>& m) {
    return m ? *m : MomentSequence::factorial();
}

}  // namespace formaut
