#pragma once

// Truncated formal power series in z (Series1) and in t with Series1
// coefficients (Series2), plus exact polynomials (Poly1, Poly2).
//
// Truncation rule: a series carries coefficients 0..truncation and never
// claims more than its inputs justify. Operations on two series return the
// min of the input truncations; derivatives lower it by the order taken.
// Polynomials are exact (truncation-free) and never store zero coefficients.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "formaut/scalar.hpp"

namespace formaut {

class Series1 {
  public:
    Series1() : coeffs_(1) {}
    explicit Series1(long truncation) : coeffs_(check_trunc(truncation) + 1) {}
    explicit Series1(std::vector<Scalar> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("Series1 needs at least the constant term");
    }

    long truncation() const { return static_cast<long>(coeffs_.size()) - 1; }
    const Scalar& operator[](long n) const { return coeffs_.at(static_cast<size_t>(n)); }
    Scalar& operator[](long n) { return coeffs_.at(static_cast<size_t>(n)); }
    const std::vector<Scalar>& coeffs() const { return coeffs_; }

    // Order of vanishing; nullopt means "all stored coefficients are zero",
    // i.e. ord >= truncation + 1.
    std::optional<long> ord() const {
        for (long n = 0; n <= truncation(); ++n)
            if (!coeffs_[static_cast<size_t>(n)].is_zero()) return n;
        return std::nullopt;
    }

    bool is_zero() const { return !ord().has_value(); }

    // Restrict (or zero-extend is forbidden: only shrink) to a new truncation.
    Series1 truncated(long new_trunc) const {
        if (new_trunc > truncation())
            throw std::invalid_argument("cannot extend a truncated series");
        return Series1(std::vector<Scalar>(coeffs_.begin(), coeffs_.begin() + new_trunc + 1));
    }

    friend bool operator==(const Series1& a, const Series1& b) { return a.coeffs_ == b.coeffs_; }

  private:
    static long check_trunc(long t) {
        if (t < 0) throw std::invalid_argument("negative truncation");
        return t;
    }
    std::vector<Scalar> coeffs_;
};

inline Series1 add(const Series1& a, const Series1& b) {
    long t = std::min(a.truncation(), b.truncation());
    Series1 r(t);
    for (long n = 0; n <= t; ++n) r[n] = a[n] + b[n];
    return r;
}

inline Series1 sub(const Series1& a, const Series1& b) {
    long t = std::min(a.truncation(), b.truncation());
    Series1 r(t);
    for (long n = 0; n <= t; ++n) r[n] = a[n] - b[n];
    return r;
}

inline Series1 scale(const Scalar& c, const Series1& a) {
    Series1 r(a.truncation());
    for (long n = 0; n <= a.truncation(); ++n) r[n] = c * a[n];
    return r;
}

// Cauchy product up to the min truncation.
inline Series1 mul(const Series1& a, const Series1& b) {
    long t = std::min(a.truncation(), b.truncation());
    Series1 r(t);
    for (long n = 0; n <= t; ++n) {
        Scalar s;
        for (long k = 0; k <= n; ++k) s += a[k] * b[n - k];
        r[n] = s;
    }
    return r;
}

// j-fold formal derivative; truncation drops by j (floored at 0).
inline Series1 derive(const Series1& a, long j) {
    if (j < 0) throw std::invalid_argument("negative derivative order");
    if (j == 0) return a;
    long t = std::max<long>(a.truncation() - j, 0);
    Series1 r(t);
    for (long n = 0; n <= t && n + j <= a.truncation(); ++n) {
        Rational f(1);
        for (long h = n + 1; h <= n + j; ++h) f *= h;
        r[n] = a[n + j] * Scalar(f);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Exact polynomials.

using Poly1 = std::map<long, Scalar>;  // exponent -> coefficient, no zeros

inline void poly_set(Poly1& p, long e, const Scalar& c) {
    if (c.is_zero()) p.erase(e); else p[e] = c;
}

inline void poly_add_term(Poly1& p, long e, const Scalar& c) {
    auto it = p.find(e);
    if (it == p.end()) {
        if (!c.is_zero()) p.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) p.erase(it);
}

inline Poly1 poly_add(const Poly1& a, const Poly1& b) {
    Poly1 r = a;
    for (const auto& [e, c] : b) poly_add_term(r, e, c);
    return r;
}

inline Poly1 poly_scale(const Scalar& c, const Poly1& a) {
    Poly1 r;
    if (c.is_zero()) return r;
    for (const auto& [e, v] : a) r.emplace(e, c * v);
    return r;
}

inline Poly1 poly_mul(const Poly1& a, const Poly1& b) {
    Poly1 r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) poly_add_term(r, ea + eb, ca * cb);
    return r;
}

// Order of the zero at z=0; nullopt encodes "infinite" (zero polynomial).
inline std::optional<long> ord_z(const Poly1& p) {
    if (p.empty()) return std::nullopt;
    return p.begin()->first;
}

inline std::optional<long> degree(const Poly1& p) {
    if (p.empty()) return std::nullopt;
    return p.rbegin()->first;
}

inline Scalar poly_coeff(const Poly1& p, long e) {
    auto it = p.find(e);
    return it == p.end() ? Scalar() : it->second;
}

inline Series1 to_series(const Poly1& p, long truncation) {
    Series1 r(truncation);
    for (const auto& [e, c] : p)
        if (e <= truncation) r[e] = c;
    return r;
}

// Exact polynomial times truncated series; truncation is preserved.
inline Series1 poly_mul_series(const Poly1& p, const Series1& u) {
    Series1 r(u.truncation());
    for (const auto& [e, c] : p) {
        if (e < 0) throw std::invalid_argument("negative exponent in polynomial");
        for (long n = 0; n + e <= u.truncation(); ++n) r[n + e] += c * u[n];
    }
    return r;
}

// Bivariate polynomial in (t, z): key (t_exponent, z_exponent).
using Poly2 = std::map<std::pair<long, long>, Scalar>;

inline void poly2_add_term(Poly2& p, long te, long ze, const Scalar& c) {
    auto key = std::make_pair(te, ze);
    auto it = p.find(key);
    if (it == p.end()) {
        if (!c.is_zero()) p.emplace(key, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) p.erase(it);
}

inline std::optional<long> ord_t(const Poly2& p) {
    std::optional<long> m;
    for (const auto& [key, c] : p)
        if (!m || key.first < *m) m = key.first;
    return m;
}

// z-polynomial coefficient of t^n.
inline Poly1 slice_t(const Poly2& p, long n) {
    Poly1 r;
    for (const auto& [key, c] : p)
        if (key.first == n) r.emplace(key.second, c);
    return r;
}

inline std::optional<long> max_t_exponent(const Poly2& p) {
    std::optional<long> m;
    for (const auto& [key, c] : p)
        if (!m || key.first > *m) m = key.first;
    return m;
}

// ---------------------------------------------------------------------------
// Two-variable truncated series: u(t,z) = sum u_n(z) t^n.

class Series2 {
  public:
    Series2() : coeffs_(1, Series1(0)), trunc_z_(0) {}
    Series2(long truncation_t, long truncation_z)
        : coeffs_(static_cast<size_t>(check(truncation_t) + 1), Series1(check(truncation_z))),
          trunc_z_(truncation_z) {}
    explicit Series2(std::vector<Series1> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("Series2 needs at least one t-coefficient");
        trunc_z_ = coeffs_.front().truncation();
        for (const auto& s : coeffs_)
            if (s.truncation() != trunc_z_)
                throw std::invalid_argument("Series2 inner truncations must agree");
    }

    long truncation_t() const { return static_cast<long>(coeffs_.size()) - 1; }
    long truncation_z() const { return trunc_z_; }
    const Series1& operator[](long n) const { return coeffs_.at(static_cast<size_t>(n)); }
    Series1& operator[](long n) { return coeffs_.at(static_cast<size_t>(n)); }

    bool is_zero() const {
        for (const auto& s : coeffs_)
            if (!s.is_zero()) return false;
        return true;
    }

    friend bool operator==(const Series2& a, const Series2& b) {
        return a.trunc_z_ == b.trunc_z_ && a.coeffs_ == b.coeffs_;
    }

  private:
    static long check(long t) {
        if (t < 0) throw std::invalid_argument("negative truncation");
        return t;
    }
    std::vector<Series1> coeffs_;
    long trunc_z_;
};

inline Series2 add(const Series2& a, const Series2& b) {
    long tt = std::min(a.truncation_t(), b.truncation_t());
    long tz = std::min(a.truncation_z(), b.truncation_z());
    std::vector<Series1> out;
    out.reserve(static_cast<size_t>(tt) + 1);
    for (long n = 0; n <= tt; ++n)
        out.push_back(add(a[n].truncated(tz), b[n].truncated(tz)));
    return Series2(std::move(out));
}

inline Series2 sub(const Series2& a, const Series2& b) {
    long tt = std::min(a.truncation_t(), b.truncation_t());
    long tz = std::min(a.truncation_z(), b.truncation_z());
    std::vector<Series1> out;
    out.reserve(static_cast<size_t>(tt) + 1);
    for (long n = 0; n <= tt; ++n)
        out.push_back(sub(a[n].truncated(tz), b[n].truncated(tz)));
    return Series2(std::move(out));
}

inline Series2 to_series2(const Poly2& p, long truncation_t, long truncation_z) {
    Series2 r(truncation_t, truncation_z);
    for (const auto& [key, c] : p)
        if (key.first <= truncation_t && key.second <= truncation_z)
            r[key.first][key.second] = c;
    return r;
}

}  // namespace formaut
