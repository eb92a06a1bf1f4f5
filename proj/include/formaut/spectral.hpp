#pragma once

// Characteristic polynomials and exact non-resonance certification.
//
// W_m(lambda) = sum_{j in Lambda_m} a_{j,j+m} lambda (lambda-1)...(lambda-j+1)
// drives the coefficient recursion; non-resonance means it never vanishes at
// the relevant nonnegative integers. In one variable this is decided exactly
// through a Cauchy root bound. The two-variable polynomial W_{m,l}(n,k,0) is
// a semi-decision problem: certificate / witness / bounded scan.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "formaut/moment.hpp"
#include "formaut/newton.hpp"
#include "formaut/operators.hpp"
#include "formaut/scalar.hpp"

namespace formaut {

// Univariate polynomial over Scalar, ascending powers, no trailing zeros.
// The empty coefficient vector is the zero polynomial.
class CharPoly {
  public:
    CharPoly() = default;
    explicit CharPoly(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { normalize(); }
    static CharPoly constant(const Scalar& s) { return CharPoly({s}); }

    bool is_zero() const { return c_.empty(); }
    long degree() const { return static_cast<long>(c_.size()) - 1; }  // -1 for zero
    const std::vector<Scalar>& coeffs() const { return c_; }
    Scalar coeff(long i) const {
        return i >= 0 && i < static_cast<long>(c_.size()) ? c_[static_cast<size_t>(i)] : Scalar();
    }

    Scalar eval(const Scalar& x) const {
        Scalar acc;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    Scalar eval(long n) const { return eval(Scalar(n)); }

    friend CharPoly operator+(const CharPoly& a, const CharPoly& b) {
        std::vector<Scalar> out(std::max(a.c_.size(), b.c_.size()));
        for (size_t i = 0; i < out.size(); ++i) {
            if (i < a.c_.size()) out[i] += a.c_[i];
            if (i < b.c_.size()) out[i] += b.c_[i];
        }
        return CharPoly(std::move(out));
    }
    friend CharPoly operator*(const CharPoly& a, const CharPoly& b) {
        if (a.is_zero() || b.is_zero()) return CharPoly();
        std::vector<Scalar> out(a.c_.size() + b.c_.size() - 1);
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        return CharPoly(std::move(out));
    }
    friend CharPoly operator*(const Scalar& s, const CharPoly& a) {
        std::vector<Scalar> out = a.c_;
        for (auto& x : out) x = s * x;
        return CharPoly(std::move(out));
    }
    friend bool operator==(const CharPoly& a, const CharPoly& b) { return a.c_ == b.c_; }

  private:
    void normalize() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
    std::vector<Scalar> c_;
};

// Falling factorial lambda (lambda-1) ... (lambda-j+1) as a polynomial;
// empty product (j = 0) is 1.
inline CharPoly falling_factorial_poly(long j) {
    CharPoly p = CharPoly::constant(Scalar(1));
    for (long i = 0; i < j; ++i) p = p * CharPoly({Scalar(-i), Scalar(1)});
    return p;
}

// n (n-1) ... (n-j+1) as an exact value; zero when j > n.
inline Rational falling_factorial_value(long n, long j) {
    Rational r(1);
    for (long i = 0; i < j; ++i) r *= (n - i);
    return r;
}

// Characteristic polynomial at a prescribed level: sum over the terms whose
// point sits at height `level` of the Newton polygon. The zero polynomial
// when no term does.
inline CharPoly char_poly_at_level(const Operator1& P, long level) {
    CharPoly w;
    for (const auto& [j, a] : P.terms) {
        auto o = ord_z(a);
        if (o && *o - j == level) w = w + a.begin()->second * falling_factorial_poly(j);
    }
    return w;
}

// W_m at the operator's own lower ordinate m.
inline CharPoly char_poly_1d(const Operator1& P) {
    if (P.empty()) throw EmptyOperatorError();
    return char_poly_at_level(P, polygon_1d(P).lower_ordinate);
}

// ---------------------------------------------------------------------------
// Resonance verdicts.

struct ResonanceVerdict {
    enum class Kind { Holds, FailsAt, UndecidedBeyond };
    enum class Certificate { None, SignUniform, ExhaustiveRootBound };

    Kind kind = Kind::Holds;
    Certificate certificate = Certificate::None;
    std::vector<long> witness;  // failing index (1 or 2 components)
    long bound = 0;             // scan bound (exhaustive or undecided)

    bool holds() const { return kind == Kind::Holds; }
    bool fails() const { return kind == Kind::FailsAt; }
    bool undecided() const { return kind == Kind::UndecidedBeyond; }

    static ResonanceVerdict holds_sign_uniform() {
        return {Kind::Holds, Certificate::SignUniform, {}, 0};
    }
    static ResonanceVerdict holds_root_bound(long b) {
        return {Kind::Holds, Certificate::ExhaustiveRootBound, {}, b};
    }
    static ResonanceVerdict fails_at(std::vector<long> w) {
        return {Kind::FailsAt, Certificate::None, std::move(w), 0};
    }
    static ResonanceVerdict undecided_beyond(long b) {
        return {Kind::UndecidedBeyond, Certificate::None, {}, b};
    }

    friend bool operator==(const ResonanceVerdict& a, const ResonanceVerdict& b) {
        return a.kind == b.kind && a.witness == b.witness;
    }
};

// |re| + |im| bounds |c| above; max(|re|, |im|) bounds it below. Both exact.
inline Rational modulus_upper(const Scalar& s) { return rational_abs(s.re) + rational_abs(s.im); }
inline Rational modulus_lower(const Scalar& s) {
    return std::max(rational_abs(s.re), rational_abs(s.im));
}

// Cauchy bound: every root of W has modulus < 1 + max_i |c_i| / |c_d|.
inline long integer_root_scan_bound(const CharPoly& w) {
    long d = w.degree();
    if (d <= 0) return 0;
    Rational num(0);
    for (long i = 0; i < d; ++i) num = std::max(num, modulus_upper(w.coeff(i)));
    Rational den = modulus_lower(w.coeff(d));
    Rational bound = Rational(1) + num / den;
    mpz_class ceil_q;
    mpz_cdiv_q(ceil_q.get_mpz_t(), bound.get_num().get_mpz_t(), bound.get_den().get_mpz_t());
    // Refuse rather than truncate: a clipped bound could certify a wrong
    // "holds".
    if (!mpz_fits_slong_p(ceil_q.get_mpz_t()) || ceil_q > 100000000)
        throw std::runtime_error("integer root scan bound exceeds the supported range");
    return ceil_q.get_si();
}

// Exact decision of "W(n) != 0 for every integer n >= min_index": tests all
// integers up to the Cauchy bound. The zero polynomial fails at min_index.
inline ResonanceVerdict nonneg_integer_roots(const CharPoly& w, long min_index = 0) {
    if (w.is_zero()) return ResonanceVerdict::fails_at({min_index});
    long bound = integer_root_scan_bound(w);
    for (long n = min_index; n <= bound; ++n)
        if (w.eval(n).is_zero()) return ResonanceVerdict::fails_at({n});
    return ResonanceVerdict::holds_root_bound(bound);
}

// ---------------------------------------------------------------------------
// Bivariate polynomials in (n, k).

class CharPoly2 {
  public:
    CharPoly2() = default;

    void add_term(long i, long j, const Scalar& c) {
        auto key = std::make_pair(i, j);
        auto it = c_.find(key);
        if (it == c_.end()) {
            if (!c.is_zero()) c_.emplace(key, c);
            return;
        }
        it->second += c;
        if (it->second.is_zero()) c_.erase(it);
    }

    bool is_zero() const { return c_.empty(); }
    const std::map<std::pair<long, long>, Scalar>& coeffs() const { return c_; }

    long degree_n() const {
        long d = -1;
        for (const auto& [ij, c] : c_) d = std::max(d, ij.first);
        return d;
    }
    long degree_k() const {
        long d = -1;
        for (const auto& [ij, c] : c_) d = std::max(d, ij.second);
        return d;
    }

    Scalar eval(long n, long k) const {
        Scalar acc;
        for (const auto& [ij, c] : c_)
            acc += c * scalar_pow(Scalar(n), ij.first) * scalar_pow(Scalar(k), ij.second);
        return acc;
    }

    // Specialize n; result is a polynomial in k.
    CharPoly specialize_n(long n) const {
        std::vector<Scalar> out(static_cast<size_t>(std::max<long>(degree_k(), -1) + 1));
        for (const auto& [ij, c] : c_)
            out[static_cast<size_t>(ij.second)] += c * scalar_pow(Scalar(n), ij.first);
        return CharPoly(std::move(out));
    }
    CharPoly specialize_k(long k) const {
        std::vector<Scalar> out(static_cast<size_t>(std::max<long>(degree_n(), -1) + 1));
        for (const auto& [ij, c] : c_)
            out[static_cast<size_t>(ij.first)] += c * scalar_pow(Scalar(k), ij.second);
        return CharPoly(std::move(out));
    }

    friend CharPoly2 operator*(const Scalar& s, const CharPoly2& a) {
        CharPoly2 out;
        for (const auto& [ij, c] : a.c_) out.add_term(ij.first, ij.second, s * c);
        return out;
    }
    friend bool operator==(const CharPoly2& a, const CharPoly2& b) { return a.c_ == b.c_; }

  private:
    std::map<std::pair<long, long>, Scalar> c_;
};

struct EmptyPrincipalPart : std::invalid_argument {
    EmptyPrincipalPart() : std::invalid_argument("empty principal part slice") {}
};

// W_{m,l}(n,k,0) = sum over Lambda_{m,l} of
//   a-tilde_{j,r,j-m}(0) * n(n-1)...(n-(j-m)+1) * k(k-1)...(k-r+1).
// Lambda_{m,l} collects the (j, r) in the Dt-principal slice whose
// z-coefficient a_{j,r,j-m} has ord_z - r equal to l.
inline CharPoly2 char_poly_2d(const Operator2& P, long m, long l) {
    if (m < 0) throw NegativeM(m);
    CharPoly2 w;
    bool any = false;
    for (const auto& [jr, a] : P.terms) {
        const auto [j, r] = jr;
        auto o = ord_t(a);
        if (!o || j - *o != m) continue;
        Poly1 slice = slice_t(a, j - m);
        auto oz = ord_z(slice);
        if (!oz || *oz - r != l) continue;
        any = true;
        Scalar lead = slice.begin()->second;  // a-tilde(0): coefficient of z^{ord}
        CharPoly fn = falling_factorial_poly(j - m);
        CharPoly fk = falling_factorial_poly(r);
        for (long i = 0; i <= fn.degree(); ++i)
            for (long h = 0; h <= fk.degree(); ++h)
                w.add_term(i, h, lead * fn.coeff(i) * fk.coeff(h));
    }
    if (!any) throw EmptyPrincipalPart();
    return w;
}

// Semi-decision of W(n,k) != 0 for all nonnegative integers (n,k):
//  1. sign-uniform certificate (all real coefficients of one strict sign with
//     a nonzero constant term),
//  2. exact decision when W is univariate,
//  3. bounded scan over n, each specialization decided exactly over all k
//     through the root bound,
//  4. otherwise UndecidedBeyond(n_bound).
inline ResonanceVerdict nonresonance_2d(const CharPoly2& w, long n_bound) {
    if (n_bound < 0) throw std::invalid_argument("n_bound must be nonnegative");
    if (w.is_zero()) return ResonanceVerdict::fails_at({0, 0});

    // Constant term is W(0,0).
    bool has_const = false;
    bool all_real = true, all_pos = true, all_neg = true;
    for (const auto& [ij, c] : w.coeffs()) {
        if (ij.first == 0 && ij.second == 0) has_const = true;
        if (c.im != 0) all_real = false;
        if (c.re <= 0) all_pos = false;
        if (c.re >= 0) all_neg = false;
    }
    if (!has_const) return ResonanceVerdict::fails_at({0, 0});
    if (all_real && (all_pos || all_neg)) return ResonanceVerdict::holds_sign_uniform();

    if (w.degree_k() <= 0) {
        ResonanceVerdict v = nonneg_integer_roots(w.specialize_k(0));
        if (v.fails()) return ResonanceVerdict::fails_at({v.witness[0], 0});
        return v;
    }
    if (w.degree_n() <= 0) {
        ResonanceVerdict v = nonneg_integer_roots(w.specialize_n(0));
        if (v.fails()) return ResonanceVerdict::fails_at({0, v.witness[0]});
        return v;
    }

    for (long n = 0; n <= n_bound; ++n) {
        ResonanceVerdict v = nonneg_integer_roots(w.specialize_n(n));
        if (v.fails()) return ResonanceVerdict::fails_at({n, v.witness[0]});
    }
    return ResonanceVerdict::undecided_beyond(n_bound);
}

// ---------------------------------------------------------------------------
// Generalized (moment) characteristic polynomial, evaluated pointwise:
// W_{m,\m}(lambda) = sum_{j in Lambda_m, j <= lambda} a_{j,j+m} m_lambda/m_{lambda-j}.

using ScalarOrInterval = std::variant<Scalar, ComplexInterval>;

inline ScalarOrInterval generalized_char_poly(const Operator1& P, const MomentSequence& m,
                                              long lambda) {
    if (lambda < 0) throw std::invalid_argument("lambda must be nonnegative");
    if (P.empty()) throw EmptyOperatorError();
    long level = polygon_1d(P).lower_ordinate;
    if (m.exact_ratios()) {
        Scalar acc;
        for (const auto& [j, a] : P.terms) {
            auto o = ord_z(a);
            if (o && *o - j == level && j <= lambda)
                acc += a.begin()->second * Scalar(m.ratio_exact(lambda, j));
        }
        return acc;
    }
    ComplexInterval acc = ComplexInterval::from_scalar(Scalar(0));
    for (const auto& [j, a] : P.terms) {
        auto o = ord_z(a);
        if (o && *o - j == level && j <= lambda)
            acc = civ_add(acc, civ_mul_real(ComplexInterval::from_scalar(a.begin()->second),
                                            m.ratio_interval(lambda, j)));
    }
    return acc;
}

}  // namespace formaut
