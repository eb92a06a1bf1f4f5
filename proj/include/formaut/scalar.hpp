#pragma once

// Exact scalar field Q(i): Gaussian rationals with arbitrary-precision
// components. All arithmetic is exact; equality means equality.

#include <gmpxx.h>

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace formaut {

using Rational = mpq_class;

inline Rational rational_from_long(long n) { return Rational(n); }

// den > 0 required by mpq canonical form; mpq_class handles reduction.
inline Rational make_rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// b^e for integer e (negative e inverts; 0^negative throws).
inline Rational rational_pow(const Rational& b, long e) {
    if (e == 0) return Rational(1);
    if (b == 0 && e < 0) throw std::domain_error("0 raised to negative power");
    unsigned long ae = static_cast<unsigned long>(e < 0 ? -e : e);
    Rational r;
    mpz_pow_ui(mpq_numref(r.get_mpq_t()), mpq_numref(b.get_mpq_t()), ae);
    mpz_pow_ui(mpq_denref(r.get_mpq_t()), mpq_denref(b.get_mpq_t()), ae);
    if (e < 0) {
        if (r == 0) throw std::domain_error("0 raised to negative power");
        mpq_inv(r.get_mpq_t(), r.get_mpq_t());
    }
    return r;
}

inline Rational rational_abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

inline std::string to_string(const Rational& x) { return x.get_str(); }

// Parses "p", "-p", "p/q" (q > 0 after normalization).
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    Rational r;
    if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
        throw std::invalid_argument("bad rational literal: '" + text + "'");
    if (mpz_sgn(mpq_denref(r.get_mpq_t())) == 0)
        throw std::invalid_argument("rational with zero denominator: '" + text + "'");
    r.canonicalize();
    return r;
}

struct Scalar {
    Rational re;
    Rational im;

    Scalar() : re(0), im(0) {}
    Scalar(long n) : re(n), im(0) {}  // NOLINT(google-explicit-constructor)
    Scalar(Rational r) : re(std::move(r)), im(0) {}
    Scalar(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static Scalar i() { return Scalar(Rational(0), Rational(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    Scalar conj() const { return Scalar(re, Rational(-im)); }
    Rational norm2() const { return re * re + im * im; }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        return Scalar(a.re + b.re, a.im + b.im);
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        return Scalar(a.re - b.re, a.im - b.im);
    }
    friend Scalar operator-(const Scalar& a) { return Scalar(Rational(-a.re), Rational(-a.im)); }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        return Scalar(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        if (b.is_zero()) throw std::domain_error("scalar division by zero");
        Rational n2 = b.norm2();
        Scalar p = a * b.conj();
        return Scalar(p.re / n2, p.im / n2);
    }
    Scalar& operator+=(const Scalar& o) { re += o.re; im += o.im; return *this; }
    Scalar& operator-=(const Scalar& o) { re -= o.re; im -= o.im; return *this; }
    Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
    // Ordering is lexicographic on (re, im); used only for map keys.
    friend bool operator<(const Scalar& a, const Scalar& b) {
        if (a.re != b.re) return a.re < b.re;
        return a.im < b.im;
    }
};

inline Scalar scalar_pow(const Scalar& b, long e) {
    if (e < 0) return Scalar(1) / scalar_pow(b, -e);
    Scalar r(1);
    Scalar base = b;
    long k = e;
    while (k > 0) {
        if (k & 1) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

// Scalar literal format used by problem files and reports:
//   "3/7", "-2", "1/2+1/3i", "2-i", "i", "-3i", "0"
inline std::string to_literal(const Scalar& s) {
    auto imag_part = [](const Rational& v) -> std::string {
        if (v == 1) return "i";
        if (v == -1) return "-i";
        return to_string(v) + "i";
    };
    if (s.is_zero()) return "0";
    if (s.im == 0) return to_string(s.re);
    if (s.re == 0) return imag_part(s.im);
    std::string t = to_string(s.re);
    if (s.im > 0) t += "+";
    return t + imag_part(s.im);
}

inline Scalar parse_scalar_literal(const std::string& text) {
    // [sign] part [sign part], part := digits[/digits]["i"] | "i"
    size_t pos = 0;
    auto fail = [&]() -> void {
        throw std::invalid_argument("bad scalar literal: '" + text + "'");
    };
    auto parse_part = [&](bool& is_imag) -> Rational {
        bool neg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            neg = text[pos] == '-';
            ++pos;
        }
        if (pos < text.size() && text[pos] == 'i' &&
            (pos + 1 == text.size() || text[pos + 1] == '+' || text[pos + 1] == '-')) {
            ++pos;
            is_imag = true;
            return Rational(neg ? -1 : 1);
        }
        size_t start = pos;
        while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
            ++pos;
        if (pos == start) fail();
        Rational v = parse_rational(text.substr(start, pos - start));
        is_imag = false;
        if (pos < text.size() && text[pos] == 'i') {
            ++pos;
            is_imag = true;
        }
        return neg ? Rational(-v) : v;
    };

    Scalar out;
    bool imag = false;
    Rational first = parse_part(imag);
    (imag ? out.im : out.re) = first;
    if (pos < text.size()) {
        bool imag2 = false;
        Rational second = parse_part(imag2);
        if (pos != text.size() || imag2 == imag) fail();
        (imag2 ? out.im : out.re) = second;
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << to_literal(s); }

}  // namespace formaut
