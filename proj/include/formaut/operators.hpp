#pragma once

// Normal-form linear operators with exact polynomial coefficients:
//   Operator1 = sum_j a_j(z) D^j          acting on series in z
//   Operator2 = sum_{(j,r)} a_{jr}(t,z) Dt^j Dz^r
// plus application to truncated series, the m-fold formal antiderivative in t
// (zero integration constants), and the integro-differential composition
// P Dt^{-m}. Derivatives may be classical or moment derivatives; classical is
// the factorial moment sequence.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "formaut/moment.hpp"
#include "formaut/scalar.hpp"
#include "formaut/series.hpp"

namespace formaut {

struct Operator1 {
    std::map<long, Poly1> terms;  // derivative order j -> coefficient a_j(z)
    bool moment_z = false;        // parsed with Dmz rather than Dz

    bool empty() const { return terms.empty(); }
    long max_order() const { return terms.empty() ? 0 : terms.rbegin()->first; }

    void add_term(long j, long z_exp, const Scalar& c) {
        if (j < 0 || z_exp < 0) throw std::invalid_argument("negative exponent in operator term");
        poly_add_term(terms[j], z_exp, c);
        if (terms[j].empty()) terms.erase(j);
    }

    friend bool operator==(const Operator1& a, const Operator1& b) {
        return a.terms == b.terms && a.moment_z == b.moment_z;
    }
};

struct Operator2 {
    std::map<std::pair<long, long>, Poly2> terms;  // (j, r) -> a_{jr}(t, z)
    bool moment_t = false;
    bool moment_z = false;

    bool empty() const { return terms.empty(); }
    long max_order_t() const {
        long m = 0;
        for (const auto& [jr, c] : terms) m = std::max(m, jr.first);
        return m;
    }
    long max_order_z() const {
        long m = 0;
        for (const auto& [jr, c] : terms) m = std::max(m, jr.second);
        return m;
    }

    void add_term(long j, long r, long t_exp, long z_exp, const Scalar& c) {
        if (j < 0 || r < 0 || t_exp < 0 || z_exp < 0)
            throw std::invalid_argument("negative exponent in operator term");
        auto key = std::make_pair(j, r);
        poly2_add_term(terms[key], t_exp, z_exp, c);
        if (terms[key].empty()) terms.erase(key);
    }

    friend bool operator==(const Operator2& a, const Operator2& b) {
        return a.terms == b.terms && a.moment_t == b.moment_t && a.moment_z == b.moment_z;
    }
};

// Materializes an operator whose coefficients are given programmatically as
// formal power series, a_j(z) = sum_k coeff(j, k) z^k, truncated at z_limit.
// Every finite-truncation computation reads only finitely many coefficients;
// the caller must pick z_limit large enough that each coefficient's order of
// vanishing falls inside the window (ord_z decisions see only the window).
inline Operator1 operator_from_coefficients(const std::vector<long>& orders,
                                            const std::function<Scalar(long, long)>& coeff,
                                            long z_limit) {
    Operator1 op;
    for (long j : orders)
        for (long k = 0; k <= z_limit; ++k) op.add_term(j, k, coeff(j, k));
    return op;
}

// Two-variable analogue: a_{jr}(t, z) = sum coeff(j, r, nu, k) t^nu z^k.
inline Operator2 operator_from_coefficients(
    const std::vector<std::pair<long, long>>& orders,
    const std::function<Scalar(long, long, long, long)>& coeff, long t_limit, long z_limit) {
    Operator2 op;
    for (const auto& [j, r] : orders)
        for (long nu = 0; nu <= t_limit; ++nu)
            for (long k = 0; k <= z_limit; ++k) op.add_term(j, r, nu, k, coeff(j, r, nu, k));
    return op;
}

// ---------------------------------------------------------------------------
// Application.

// P u = sum_j a_j(z) d^j u; truncation = u.truncation - max j. A series
// shorter than the operator order has no fully determined output coefficient
// at all, which the truncation type cannot express.
inline Series1 apply1(const Operator1& P, const Series1& u,
                      const MomentSequence& mz = MomentSequence::factorial()) {
    if (u.truncation() < P.max_order())
        throw std::invalid_argument("series truncation is below the operator order");
    long t = std::max<long>(u.truncation() - P.max_order(), 0);
    Series1 out(t);
    for (const auto& [j, a] : P.terms) {
        Series1 d = mz.kind() == MomentSequence::Kind::Factorial ? derive(u, j)
                                                                 : moment_derive(mz, u, j);
        Series1 prod = poly_mul_series(a, d);
        for (long n = 0; n <= t && n <= prod.truncation(); ++n) out[n] += prod[n];
    }
    return out;
}

// Moment derivative in t applied to a two-variable series (coefficientwise on
// the t-coefficient sequence).
inline std::vector<Series1> derive_t(const Series2& u, long j, const MomentSequence& mt) {
    long tt = std::max<long>(u.truncation_t() - j, 0);
    std::vector<Series1> out;
    out.reserve(static_cast<size_t>(tt) + 1);
    for (long n = 0; n <= tt; ++n) {
        if (n + j <= u.truncation_t())
            out.push_back(scale(Scalar(mt.ratio_exact(n + j, j)), u[n + j]));
        else
            out.push_back(Series1(u.truncation_z()));
    }
    return out;
}

// P u for a two-variable operator; truncations drop by max_j in t and max_r
// in z.
inline Series2 apply2(const Operator2& P, const Series2& u,
                      const MomentSequence& mt = MomentSequence::factorial(),
                      const MomentSequence& mz = MomentSequence::factorial()) {
    if (u.truncation_t() < P.max_order_t() || u.truncation_z() < P.max_order_z())
        throw std::invalid_argument("series truncations are below the operator orders");
    long tt = std::max<long>(u.truncation_t() - P.max_order_t(), 0);
    long tz = std::max<long>(u.truncation_z() - P.max_order_z(), 0);
    Series2 out(tt, tz);
    for (const auto& [jr, a] : P.terms) {
        const auto [j, r] = jr;
        std::vector<Series1> dt = derive_t(u, j, mt);
        // d_z^r on each t-coefficient.
        std::vector<Series1> d;
        d.reserve(dt.size());
        for (const auto& s : dt)
            d.push_back(mz.kind() == MomentSequence::Kind::Factorial ? derive(s, r)
                                                                     : moment_derive(mz, s, r));
        // Multiply by a_{jr}(t,z): t^nu shifts up, z-polynomial multiplies.
        for (const auto& [key, c] : a) {
            const auto [nu, ze] = key;
            Poly1 zmono{{ze, c}};
            for (long n = 0; n + nu <= tt && n < static_cast<long>(d.size()); ++n) {
                Series1 contrib = poly_mul_series(zmono, d[static_cast<size_t>(n)]);
                for (long kk = 0; kk <= tz && kk <= contrib.truncation(); ++kk)
                    out[n + nu][kk] += contrib[kk];
            }
        }
    }
    return out;
}

// m-fold formal antiderivative in t with zero constants:
// coefficient of t^n = u_{n-m} * m_{n-m}/m_n (factorial: (n-m)!/n!).
inline Series2 integrate_t(const Series2& u, long m,
                           const MomentSequence& mt = MomentSequence::factorial()) {
    if (m < 0) throw std::invalid_argument("integrate_t needs m >= 0");
    if (m == 0) return u;
    long tt = u.truncation_t() + m;
    Series2 out(tt, u.truncation_z());
    for (long n = m; n <= tt; ++n) {
        Rational f = Rational(1) / mt.ratio_exact(n, m);
        out[n] = scale(Scalar(f), u[n - m]);
    }
    return out;
}

// P Dt^{-m} u = apply2(P, integrate_t(u, m)).
inline Series2 apply_integro(const Operator2& P, long m, const Series2& u,
                             const MomentSequence& mt = MomentSequence::factorial(),
                             const MomentSequence& mz = MomentSequence::factorial()) {
    return apply2(P, integrate_t(u, m, mt), mt, mz);
}

// ---------------------------------------------------------------------------
// Canonical printing. parse_operator(pretty_print(P)) == P on normal forms.

namespace detail {

// Coefficient in operator-grammar syntax; parenthesized when it is not a
// plain nonnegative rational.
inline std::string coeff_grammar(const Scalar& c) {
    if (c.im == 0) {
        if (c.re >= 0) return to_string(c.re);
        return "(-" + to_string(rational_abs(c.re)) + ")";
    }
    auto imag = [](const Rational& v) -> std::string {
        Rational a = rational_abs(v);
        return a == 1 ? "i" : to_string(a) + "*i";
    };
    std::string s = "(";
    if (c.re != 0) {
        if (c.re < 0) s += "-";
        s += to_string(rational_abs(c.re));
        s += c.im < 0 ? "-" : "+";
    } else if (c.im < 0) {
        s += "-";
    }
    s += imag(c.im) + ")";
    return s;
}

inline void append_power(std::vector<std::string>& parts, const std::string& sym, long e) {
    if (e == 0) return;
    if (e == 1) parts.push_back(sym);
    else parts.push_back(sym + "^" + std::to_string(e));
}

inline std::string monomial_grammar(const Scalar& c, long te, long ze, long j, long r,
                                    bool moment_t, bool moment_z) {
    std::vector<std::string> parts;
    std::string cs = coeff_grammar(c);
    if (cs != "1" || (te == 0 && ze == 0 && j == 0 && r == 0)) parts.push_back(cs);
    append_power(parts, "t", te);
    append_power(parts, "z", ze);
    append_power(parts, moment_t ? "Dmt" : "Dt", j);
    append_power(parts, moment_z ? "Dmz" : "Dz", r);
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += "*";
        out += parts[i];
    }
    return out;
}

}  // namespace detail

inline std::string pretty_print(const Operator1& P) {
    if (P.empty()) return "0";
    std::vector<std::string> monos;
    for (const auto& [j, a] : P.terms)
        for (const auto& [e, c] : a)
            monos.push_back(detail::monomial_grammar(c, 0, e, 0, j, false, P.moment_z));
    std::string out;
    for (size_t i = 0; i < monos.size(); ++i) {
        if (i) out += " + ";
        out += monos[i];
    }
    return out;
}

inline std::string pretty_print(const Operator2& P) {
    if (P.empty()) return "0";
    std::vector<std::string> monos;
    for (const auto& [jr, a] : P.terms)
        for (const auto& [key, c] : a)
            monos.push_back(detail::monomial_grammar(c, key.first, key.second, jr.first, jr.second,
                                                     P.moment_t, P.moment_z));
    std::string out;
    for (size_t i = 0; i < monos.size(); ++i) {
        if (i) out += " + ";
        out += monos[i];
    }
    return out;
}

inline std::string pretty_print(const Poly1& p) {
    if (p.empty()) return "0";
    std::vector<std::string> monos;
    for (const auto& [e, c] : p) monos.push_back(detail::monomial_grammar(c, 0, e, 0, 0, false, false));
    std::string out;
    for (size_t i = 0; i < monos.size(); ++i) {
        if (i) out += " + ";
        out += monos[i];
    }
    return out;
}

inline std::string pretty_print(const Poly2& p) {
    if (p.empty()) return "0";
    std::vector<std::string> monos;
    for (const auto& [key, c] : p)
        monos.push_back(detail::monomial_grammar(c, key.first, key.second, 0, 0, false, false));
    std::string out;
    for (size_t i = 0; i < monos.size(); ++i) {
        if (i) out += " + ";
        out += monos[i];
    }
    return out;
}

}  // namespace formaut
