#pragma once

// Recursive-descent parser for the operator/series expression grammar:
//
//   expr    := ["+"|"-"] term (("+"|"-") term)*
//   term    := factor ("*" factor)*
//   factor  := atom ("^" nat)?
//   atom    := rational | "i" | ident | "z" | "t" | "Dz" | "Dt" | "Dmz" | "Dmt" | "(" expr ")"
//   rational:= nat ("/" nat)?
//
// Whitespace is insignificant. Operators must be in left-normal form: within
// a product, a derivative factor may not be followed by a variable factor
// ("Dz*z" is rejected); scalars commute freely. Free identifiers must be
// bound to exact scalars through the params map.

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "formaut/operators.hpp"
#include "formaut/scalar.hpp"
#include "formaut/series.hpp"

namespace formaut {

struct ParseError : std::runtime_error {
    ParseError(std::string msg, size_t position)
        : std::runtime_error(std::move(msg) + " at position " + std::to_string(position)),
          pos(position) {}
    size_t pos;
};

struct SyntaxError : ParseError {
    using ParseError::ParseError;
};

struct UnboundParameter : ParseError {
    UnboundParameter(const std::string& name, size_t position)
        : ParseError("unbound parameter '" + name + "'", position), name(name) {}
    std::string name;
};

struct NonNormalForm : ParseError {
    explicit NonNormalForm(size_t position)
        : ParseError("derivative symbol appears left of a variable factor", position) {}
};

namespace detail {

enum class Tok { Num, Ident, Plus, Minus, Star, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    size_t pos;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }

    const Token& peek() const { return cur_; }
    Token take() {
        Token t = cur_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        size_t start = i_;
        if (i_ >= s_.size()) {
            cur_ = {Tok::End, "", start};
            return;
        }
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i_;
            while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
            if (j < s_.size() && s_[j] == '/') {
                size_t k = j + 1;
                while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
                if (k == j + 1) throw SyntaxError("expected digits after '/'", j + 1);
                j = k;
            }
            cur_ = {Tok::Num, s_.substr(i_, j - i_), start};
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i_;
            while (j < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
                ++j;
            cur_ = {Tok::Ident, s_.substr(i_, j - i_), start};
            i_ = j;
            return;
        }
        ++i_;
        switch (c) {
            case '+': cur_ = {Tok::Plus, "+", start}; return;
            case '-': cur_ = {Tok::Minus, "-", start}; return;
            case '*': cur_ = {Tok::Star, "*", start}; return;
            case '^': cur_ = {Tok::Caret, "^", start}; return;
            case '(': cur_ = {Tok::LParen, "(", start}; return;
            case ')': cur_ = {Tok::RParen, ")", start}; return;
            default:
                throw SyntaxError(std::string("unexpected character '") + c + "'", start);
        }
    }

    const std::string& s_;
    size_t i_ = 0;
    Token cur_{Tok::End, "", 0};
};

// One normal-form monomial c * t^te * z^ze * Dt^dt * Dz^dz.
struct Mono {
    Scalar c;
    long te = 0, ze = 0;
    long dt = 0, dz = 0;
    bool mt = false, mz = false;  // derivative symbols were Dmt / Dmz

    bool has_derivative() const { return dt > 0 || dz > 0; }
    bool has_variable() const { return te > 0 || ze > 0; }
};

using MonoSum = std::vector<Mono>;

// Combine like monomials; keeps products of large sums linear in size.
inline MonoSum mono_normalize(const MonoSum& a) {
    std::map<std::tuple<long, long, long, long, bool, bool>, Scalar> acc;
    for (const auto& m : a) acc[{m.te, m.ze, m.dt, m.dz, m.mt, m.mz}] += m.c;
    MonoSum out;
    for (const auto& [key, c] : acc) {
        if (c.is_zero()) continue;
        const auto& [te, ze, dt, dz, mt, mz] = key;
        out.push_back(Mono{c, te, ze, dt, dz, mt, mz});
    }
    return out;
}

inline MonoSum mono_mul(const MonoSum& a, const MonoSum& b, size_t pos) {
    MonoSum out;
    for (const auto& x : a)
        for (const auto& y : b) {
            if (x.has_derivative() && y.has_variable()) throw NonNormalForm(pos);
            Mono m;
            m.c = x.c * y.c;
            m.te = x.te + y.te;
            m.ze = x.ze + y.ze;
            m.dt = x.dt + y.dt;
            m.dz = x.dz + y.dz;
            m.mt = x.mt || y.mt;
            m.mz = x.mz || y.mz;
            out.push_back(m);
        }
    return mono_normalize(out);
}

inline MonoSum mono_pow(const MonoSum& a, long e, size_t pos) {
    MonoSum out{Mono{Scalar(1), 0, 0, 0, 0, false, false}};
    MonoSum base = a;
    while (e > 0) {
        if (e & 1) out = mono_mul(out, base, pos);
        e >>= 1;
        if (e) base = mono_mul(base, base, pos);
    }
    return out;
}

class Parser {
  public:
    Parser(const std::string& text, const std::map<std::string, Scalar>& params)
        : lex_(text), params_(params) {}

    MonoSum parse() {
        MonoSum e = expr();
        if (lex_.peek().kind != Tok::End)
            throw SyntaxError("unexpected trailing input", lex_.peek().pos);
        return e;
    }

  private:
    MonoSum expr() {
        bool neg = false;
        if (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus)
            neg = lex_.take().kind == Tok::Minus;
        MonoSum acc = term();
        if (neg)
            for (auto& m : acc) m.c = -m.c;
        while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
            bool minus = lex_.take().kind == Tok::Minus;
            MonoSum t = term();
            for (auto& m : t) acc.push_back(minus ? Mono{-m.c, m.te, m.ze, m.dt, m.dz, m.mt, m.mz} : m);
        }
        return acc;
    }

    MonoSum term() {
        size_t pos = lex_.peek().pos;
        MonoSum acc = factor();
        while (lex_.peek().kind == Tok::Star) {
            lex_.take();
            size_t fpos = lex_.peek().pos;
            acc = mono_mul(acc, factor(), fpos);
        }
        (void)pos;
        return acc;
    }

    MonoSum factor() {
        size_t pos = lex_.peek().pos;
        MonoSum a = atom();
        if (lex_.peek().kind == Tok::Caret) {
            lex_.take();
            Token e = lex_.take();
            if (e.kind != Tok::Num || e.text.find('/') != std::string::npos)
                throw SyntaxError("expected natural-number exponent", e.pos);
            long n = 0;
            try {
                n = std::stol(e.text);
            } catch (const std::exception&) {
                throw SyntaxError("exponent out of range", e.pos);
            }
            if (n > 1000000) throw SyntaxError("exponent out of range", e.pos);
            a = mono_pow(a, n, pos);
        }
        return a;
    }

    MonoSum atom() {
        Token t = lex_.take();
        auto single = [](Mono m) { return MonoSum{std::move(m)}; };
        switch (t.kind) {
            case Tok::Num:
                return single(Mono{Scalar(parse_rational(t.text)), 0, 0, 0, 0, false, false});
            case Tok::LParen: {
                MonoSum e = expr();
                Token close = lex_.take();
                if (close.kind != Tok::RParen) throw SyntaxError("expected ')'", close.pos);
                return e;
            }
            case Tok::Ident: {
                if (t.text == "i") return single(Mono{Scalar::i(), 0, 0, 0, 0, false, false});
                if (t.text == "z") return single(Mono{Scalar(1), 0, 1, 0, 0, false, false});
                if (t.text == "t") return single(Mono{Scalar(1), 1, 0, 0, 0, false, false});
                if (t.text == "Dz") return single(Mono{Scalar(1), 0, 0, 0, 1, false, false});
                if (t.text == "Dt") return single(Mono{Scalar(1), 0, 0, 1, 0, false, false});
                if (t.text == "Dmz") return single(Mono{Scalar(1), 0, 0, 0, 1, false, true});
                if (t.text == "Dmt") return single(Mono{Scalar(1), 0, 0, 1, 0, true, false});
                auto it = params_.find(t.text);
                if (it == params_.end()) throw UnboundParameter(t.text, t.pos);
                return single(Mono{it->second, 0, 0, 0, 0, false, false});
            }
            default:
                throw SyntaxError("expected an atom", t.pos);
        }
    }

    Lexer lex_;
    const std::map<std::string, Scalar>& params_;
};

}  // namespace detail

// Parse a one-variable operator in z. Rejects t/Dt symbols and mixed Dz/Dmz.
inline Operator1 parse_operator1(const std::string& text,
                                 const std::map<std::string, Scalar>& params = {}) {
    detail::Parser p(text, params);
    detail::MonoSum monos = p.parse();
    Operator1 op;
    bool saw_classical = false, saw_moment = false;
    for (const auto& m : monos) {
        if (m.te > 0 || m.dt > 0)
            throw SyntaxError("t and Dt are not allowed in a one-variable operator", 0);
        if (m.c.is_zero()) continue;
        if (m.dz > 0) (m.mz ? saw_moment : saw_classical) = true;
        op.add_term(m.dz, m.ze, m.c);
    }
    if (saw_classical && saw_moment)
        throw SyntaxError("mixed Dz and Dmz in one operator", 0);
    op.moment_z = saw_moment;
    return op;
}

// Parse a two-variable operator in (t, z).
inline Operator2 parse_operator2(const std::string& text,
                                 const std::map<std::string, Scalar>& params = {}) {
    detail::Parser p(text, params);
    detail::MonoSum monos = p.parse();
    Operator2 op;
    bool cl_t = false, mo_t = false, cl_z = false, mo_z = false;
    for (const auto& m : monos) {
        if (m.c.is_zero()) continue;
        if (m.dt > 0) (m.mt ? mo_t : cl_t) = true;
        if (m.dz > 0) (m.mz ? mo_z : cl_z) = true;
        op.add_term(m.dt, m.dz, m.te, m.ze, m.c);
    }
    if ((cl_t && mo_t) || (cl_z && mo_z))
        throw SyntaxError("mixed classical and moment derivative symbols", 0);
    op.moment_t = mo_t;
    op.moment_z = mo_z;
    return op;
}

// Parse a plain polynomial in z (no derivative symbols, no t).
inline Poly1 parse_poly1(const std::string& text,
                         const std::map<std::string, Scalar>& params = {}) {
    detail::Parser p(text, params);
    detail::MonoSum monos = p.parse();
    Poly1 out;
    for (const auto& m : monos) {
        if (m.dt > 0 || m.dz > 0)
            throw SyntaxError("derivative symbols are not allowed here", 0);
        if (m.te > 0) throw SyntaxError("t is not allowed in a one-variable expression", 0);
        poly_add_term(out, m.ze, m.c);
    }
    return out;
}

// Parse a plain polynomial in (t, z).
inline Poly2 parse_poly2(const std::string& text,
                         const std::map<std::string, Scalar>& params = {}) {
    detail::Parser p(text, params);
    detail::MonoSum monos = p.parse();
    Poly2 out;
    for (const auto& m : monos) {
        if (m.dt > 0 || m.dz > 0)
            throw SyntaxError("derivative symbols are not allowed here", 0);
        poly2_add_term(out, m.te, m.ze, m.c);
    }
    return out;
}

}  // namespace formaut
