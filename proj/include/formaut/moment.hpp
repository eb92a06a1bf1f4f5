#pragma once

// Moment sequences and moment derivatives. The factorial sequence recovers
// the classical derivative; the q-factorial sequence recovers the
// q-derivative; Gamma(1+n/k) sequences are handled through certified
// intervals because their ratios are irrational in general. The Gamma(1+n/k)
// derivative acting on integer-power series is the coefficient-level face of
// the Caputo-type 1/k-fractional derivative (under z -> z^(1/k)); no
// fractional-power series type is needed for that reading.

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "formaut/interval.hpp"
#include "formaut/scalar.hpp"
#include "formaut/series.hpp"

namespace formaut {

class MomentSequence {
  public:
    enum class Kind { Factorial, GammaOver, QFactorial, CustomTable };

    static MomentSequence factorial() { return MomentSequence(Kind::Factorial); }

    static MomentSequence gamma_over(Rational k) {
        if (k <= 0) throw std::invalid_argument("gamma_over needs k > 0");
        MomentSequence m(Kind::GammaOver);
        m.k_ = std::move(k);
        return m;
    }

    static MomentSequence q_factorial(Rational q) {
        if (q <= 0 || q == 1) throw std::invalid_argument("q_factorial needs q > 0, q != 1");
        MomentSequence m(Kind::QFactorial);
        m.q_ = std::move(q);
        return m;
    }

    static MomentSequence custom_table(std::vector<Rational> values) {
        if (values.empty() || values.front() != 1)
            throw std::invalid_argument("custom table must start with m_0 = 1");
        for (const auto& v : values)
            if (v <= 0) throw std::invalid_argument("custom table values must be positive");
        MomentSequence m(Kind::CustomTable);
        m.table_ = std::move(values);
        return m;
    }

    Kind kind() const { return kind_; }
    bool exact_ratios() const { return kind_ != Kind::GammaOver; }
    const Rational& gamma_k() const { return k_; }
    const Rational& q() const { return q_; }
    size_t table_size() const { return table_.size(); }

    // m_n for exact kinds. CustomTable throws IndexOutOfRange past the table.
    Rational value_exact(long n) const {
        if (n < 0) throw std::out_of_range("moment index must be nonnegative");
        switch (kind_) {
            case Kind::Factorial: {
                Rational r(1);
                for (long h = 2; h <= n; ++h) r *= h;
                return r;
            }
            case Kind::QFactorial: {
                Rational r(1);
                for (long h = 1; h <= n; ++h) r *= q_number(h);
                return r;
            }
            case Kind::CustomTable: {
                if (static_cast<size_t>(n) >= table_.size())
                    throw std::out_of_range("moment index beyond custom table");
                return table_[static_cast<size_t>(n)];
            }
            case Kind::GammaOver:
                throw std::domain_error("Gamma(1+n/k) moments have no exact rational value");
        }
        throw std::logic_error("unreachable");
    }

    MpInterval value_interval(long n) const {
        if (kind_ != Kind::GammaOver) return MpInterval::from_rational(value_exact(n));
        if (n < 0) throw std::out_of_range("moment index must be nonnegative");
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = gamma_cache_.find(n);
        if (it != gamma_cache_.end()) return it->second;
        MpInterval v = gamma_interval(Rational(1) + Rational(n) / k_);
        gamma_cache_.emplace(n, v);
        return v;
    }

    // m_lambda / m_{lambda-j} for 0 <= j <= lambda, exact kinds.
    Rational ratio_exact(long lambda, long j) const {
        check_ratio_args(lambda, j);
        switch (kind_) {
            case Kind::Factorial: {
                Rational r(1);
                for (long h = lambda - j + 1; h <= lambda; ++h) r *= h;
                return r;
            }
            case Kind::QFactorial: {
                Rational r(1);
                for (long h = lambda - j + 1; h <= lambda; ++h) r *= q_number(h);
                return r;
            }
            case Kind::CustomTable:
                return value_exact(lambda) / value_exact(lambda - j);
            case Kind::GammaOver:
                throw std::domain_error("Gamma(1+n/k) ratios are not exact; use ratio_interval");
        }
        throw std::logic_error("unreachable");
    }

    MpInterval ratio_interval(long lambda, long j) const {
        check_ratio_args(lambda, j);
        if (kind_ != Kind::GammaOver) return MpInterval::from_rational(ratio_exact(lambda, j));
        if (j == 0) return MpInterval::from_rational(Rational(1));
        return iv_div(value_interval(lambda), value_interval(lambda - j));
    }

    // q-number [h]_q = 1 + q + ... + q^(h-1), by the defining sum.
    Rational q_number(long h) const {
        Rational s(0);
        Rational p(1);
        for (long i = 0; i < h; ++i) {
            s += p;
            p *= q_;
        }
        return s;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::Factorial: return "factorial";
            case Kind::GammaOver: return "gamma_over(k=" + to_string(k_) + ")";
            case Kind::QFactorial: return "q_factorial(q=" + to_string(q_) + ")";
            case Kind::CustomTable: return "table[" + std::to_string(table_.size()) + "]";
        }
        return "?";
    }

  private:
    explicit MomentSequence(Kind k) : kind_(k) {}

    static void check_ratio_args(long lambda, long j) {
        if (j < 0 || j > lambda) throw std::out_of_range("moment ratio needs 0 <= j <= lambda");
    }

    Kind kind_;
    Rational k_{1};
    Rational q_{2};
    std::vector<Rational> table_;
    mutable std::mutex cache_mutex_;
    mutable std::map<long, MpInterval> gamma_cache_;

  public:
    MomentSequence(const MomentSequence& o)
        : kind_(o.kind_), k_(o.k_), q_(o.q_), table_(o.table_) {}
    MomentSequence& operator=(const MomentSequence& o) {
        kind_ = o.kind_;
        k_ = o.k_;
        q_ = o.q_;
        table_ = o.table_;
        std::lock_guard<std::mutex> lock(cache_mutex_);
        gamma_cache_.clear();
        return *this;
    }
};

// j-fold moment derivative: c_n -> c_{n+j} * m_{n+j} / m_n. Requires exact
// ratios; Gamma(1+n/k) sequences are supported at the ratio level only.
inline Series1 moment_derive(const MomentSequence& m, const Series1& u, long j) {
    if (j < 0) throw std::invalid_argument("negative derivative order");
    if (!m.exact_ratios())
        throw std::domain_error("moment_derive requires a moment sequence with exact ratios");
    if (j == 0) return u;
    long t = std::max<long>(u.truncation() - j, 0);
    Series1 r(t);
    for (long n = 0; n <= t && n + j <= u.truncation(); ++n)
        r[n] = u[n + j] * Scalar(m.ratio_exact(n + j, j));
    return r;
}

// q-derivative by the difference quotient (f(qz) - f(z)) / (qz - z):
// c_n -> c_n (q^n - 1)/(q - 1), shifted down by one.
inline Series1 q_derivative(const Series1& u, const Rational& q) {
    if (q <= 0 || q == 1) throw std::invalid_argument("q_derivative needs q > 0, q != 1");
    long t = std::max<long>(u.truncation() - 1, 0);
    Series1 r(t);
    for (long n = 1; n <= u.truncation() && n - 1 <= t; ++n) {
        Rational factor = (rational_pow(q, n) - 1) / (q - 1);
        r[n - 1] = u[n] * Scalar(factor);
    }
    return r;
}

}  // namespace formaut
