#pragma once

// Thin MPFR wrapper: 256-bit floats and directed-rounding intervals.
// Used wherever an exact rational value does not exist (Gamma ratios,
// fractional powers, logarithms of huge rationals).

#include <mpfr.h>

#include <algorithm>
#include <stdexcept>
#include <string>

#include "formaut/scalar.hpp"

namespace formaut {

inline constexpr mpfr_prec_t kPrecision = 256;

class MpFloat {
  public:
    MpFloat() { mpfr_init2(v_, kPrecision); mpfr_set_zero(v_, 1); }
    MpFloat(const MpFloat& o) { mpfr_init2(v_, kPrecision); mpfr_set(v_, o.v_, MPFR_RNDN); }
    MpFloat(MpFloat&& o) noexcept {
        mpfr_init2(v_, kPrecision);
        mpfr_swap(v_, o.v_);
    }
    MpFloat& operator=(const MpFloat& o) {
        if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
        return *this;
    }
    MpFloat& operator=(MpFloat&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~MpFloat() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

    static MpFloat from_rational(const Rational& q, mpfr_rnd_t rnd) {
        MpFloat r;
        mpfr_set_q(r.v_, q.get_mpq_t(), rnd);
        return r;
    }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    int sign() const { return mpfr_sgn(v_); }

    friend bool operator<(const MpFloat& a, const MpFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator<=(const MpFloat& a, const MpFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }

  private:
    mpfr_t v_;
};

// Closed interval [lo, hi] with outward rounding on every operation.
struct MpInterval {
    MpFloat lo, hi;

    MpInterval() = default;
    MpInterval(MpFloat l, MpFloat h) : lo(std::move(l)), hi(std::move(h)) {}

    static MpInterval from_rational(const Rational& q) {
        return {MpFloat::from_rational(q, MPFR_RNDD), MpFloat::from_rational(q, MPFR_RNDU)};
    }
    static MpInterval point_zero() { return from_rational(Rational(0)); }

    bool contains_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }
    bool is_positive() const { return lo.sign() > 0; }
    bool is_negative() const { return hi.sign() < 0; }
    double mid() const { return (lo.to_double() + hi.to_double()) / 2; }
    double width() const {
        MpFloat w;
        mpfr_sub(w.get(), hi.get(), lo.get(), MPFR_RNDU);
        return w.to_double();
    }
};

inline MpInterval iv_add(const MpInterval& a, const MpInterval& b) {
    MpInterval r;
    mpfr_add(r.lo.get(), a.lo.get(), b.lo.get(), MPFR_RNDD);
    mpfr_add(r.hi.get(), a.hi.get(), b.hi.get(), MPFR_RNDU);
    return r;
}

inline MpInterval iv_sub(const MpInterval& a, const MpInterval& b) {
    MpInterval r;
    mpfr_sub(r.lo.get(), a.lo.get(), b.hi.get(), MPFR_RNDD);
    mpfr_sub(r.hi.get(), a.hi.get(), b.lo.get(), MPFR_RNDU);
    return r;
}

inline MpInterval iv_neg(const MpInterval& a) {
    MpInterval r;
    mpfr_neg(r.lo.get(), a.hi.get(), MPFR_RNDD);
    mpfr_neg(r.hi.get(), a.lo.get(), MPFR_RNDU);
    return r;
}

// All four endpoint products, rounded both ways.
inline MpInterval iv_mul(const MpInterval& a, const MpInterval& b) {
    MpInterval r;
    mpfr_t p;
    mpfr_init2(p, kPrecision);
    bool first = true;
    const MpFloat* as[2] = {&a.lo, &a.hi};
    const MpFloat* bs[2] = {&b.lo, &b.hi};
    for (auto* x : as)
        for (auto* y : bs) {
            mpfr_mul(p, x->get(), y->get(), MPFR_RNDD);
            if (first || mpfr_cmp(p, r.lo.get()) < 0) mpfr_set(r.lo.get(), p, MPFR_RNDD);
            mpfr_mul(p, x->get(), y->get(), MPFR_RNDU);
            if (first || mpfr_cmp(p, r.hi.get()) > 0) mpfr_set(r.hi.get(), p, MPFR_RNDU);
            first = false;
        }
    mpfr_clear(p);
    return r;
}

inline MpInterval iv_div(const MpInterval& a, const MpInterval& b) {
    if (b.contains_zero()) throw std::domain_error("interval division by interval containing zero");
    MpInterval r;
    mpfr_t p;
    mpfr_init2(p, kPrecision);
    bool first = true;
    const MpFloat* as[2] = {&a.lo, &a.hi};
    const MpFloat* bs[2] = {&b.lo, &b.hi};
    for (auto* x : as)
        for (auto* y : bs) {
            mpfr_div(p, x->get(), y->get(), MPFR_RNDD);
            if (first || mpfr_cmp(p, r.lo.get()) < 0) mpfr_set(r.lo.get(), p, MPFR_RNDD);
            mpfr_div(p, x->get(), y->get(), MPFR_RNDU);
            if (first || mpfr_cmp(p, r.hi.get()) > 0) mpfr_set(r.hi.get(), p, MPFR_RNDU);
            first = false;
        }
    mpfr_clear(p);
    return r;
}

// Gamma(x) for exact rational x > 0.
inline MpInterval gamma_interval(const Rational& x) {
    if (x <= 0) throw std::domain_error("gamma_interval requires a positive argument");
    MpInterval r;
    MpFloat xd = MpFloat::from_rational(x, MPFR_RNDD);
    MpFloat xu = MpFloat::from_rational(x, MPFR_RNDU);
    // Gamma is not monotone on (0, ~1.46), so evaluate at both endpoints in
    // both directions and take the envelope; the argument interval is a few
    // ulps wide, far from straddling the minimum by more than that.
    mpfr_t a, b;
    mpfr_init2(a, kPrecision);
    mpfr_init2(b, kPrecision);
    mpfr_gamma(a, xd.get(), MPFR_RNDD);
    mpfr_gamma(b, xu.get(), MPFR_RNDD);
    if (mpfr_cmp(a, b) <= 0) mpfr_set(r.lo.get(), a, MPFR_RNDD); else mpfr_set(r.lo.get(), b, MPFR_RNDD);
    mpfr_gamma(a, xd.get(), MPFR_RNDU);
    mpfr_gamma(b, xu.get(), MPFR_RNDU);
    if (mpfr_cmp(a, b) >= 0) mpfr_set(r.hi.get(), a, MPFR_RNDU); else mpfr_set(r.hi.get(), b, MPFR_RNDU);
    mpfr_clear(a);
    mpfr_clear(b);
    return r;
}

// base^e for base >= 0 (interval) and exact rational e >= 0; monotone case.
inline MpInterval pow_interval(const MpInterval& base, const Rational& e) {
    if (base.lo.sign() < 0) throw std::domain_error("pow_interval requires a nonnegative base");
    if (e < 0) throw std::domain_error("pow_interval requires a nonnegative exponent");
    MpFloat ed = MpFloat::from_rational(e, MPFR_RNDD);
    MpFloat eu = MpFloat::from_rational(e, MPFR_RNDU);
    MpInterval r;
    mpfr_t a, b;
    mpfr_init2(a, kPrecision);
    mpfr_init2(b, kPrecision);
    // x^e is monotone in x for x >= 0; in e it depends on whether x >= 1.
    mpfr_pow(a, base.lo.get(), ed.get(), MPFR_RNDD);
    mpfr_pow(b, base.lo.get(), eu.get(), MPFR_RNDD);
    if (mpfr_cmp(a, b) <= 0) mpfr_set(r.lo.get(), a, MPFR_RNDD); else mpfr_set(r.lo.get(), b, MPFR_RNDD);
    mpfr_pow(a, base.hi.get(), ed.get(), MPFR_RNDU);
    mpfr_pow(b, base.hi.get(), eu.get(), MPFR_RNDU);
    if (mpfr_cmp(a, b) >= 0) mpfr_set(r.hi.get(), a, MPFR_RNDU); else mpfr_set(r.hi.get(), b, MPFR_RNDU);
    mpfr_clear(a);
    mpfr_clear(b);
    return r;
}

// log|q| as a double for an exact positive rational (handles magnitudes far
// outside double range).
inline double log_rational(const Rational& q) {
    if (q <= 0) throw std::domain_error("log_rational requires a positive argument");
    MpFloat x = MpFloat::from_rational(q, MPFR_RNDN);
    mpfr_log(x.get(), x.get(), MPFR_RNDN);
    return x.to_double();
}

// log of the modulus of a nonzero Gaussian rational: log sqrt(re^2 + im^2).
inline double log_magnitude(const Scalar& s) {
    if (s.is_zero()) throw std::domain_error("log_magnitude of zero");
    return log_rational(s.norm2()) / 2;
}

// Complex value with interval real and imaginary parts.
struct ComplexInterval {
    MpInterval re, im;

    static ComplexInterval from_scalar(const Scalar& s) {
        return {MpInterval::from_rational(s.re), MpInterval::from_rational(s.im)};
    }
    bool excludes_zero() const { return !re.contains_zero() || !im.contains_zero(); }
    bool is_exact_zero() const {
        return re.lo.sign() == 0 && re.hi.sign() == 0 && im.lo.sign() == 0 && im.hi.sign() == 0;
    }
};

inline ComplexInterval civ_add(const ComplexInterval& a, const ComplexInterval& b) {
    return {iv_add(a.re, b.re), iv_add(a.im, b.im)};
}

inline ComplexInterval civ_mul_real(const ComplexInterval& a, const MpInterval& r) {
    return {iv_mul(a.re, r), iv_mul(a.im, r)};
}

}  // namespace formaut
