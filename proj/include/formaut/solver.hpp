#pragma once

// Formal solution engines.
//
// solve_1d runs the coefficient recursion behind the uniqueness argument:
//   W_m(n) u_n = f_{n+m} - sum_{j=1}^{n} W~_{m,m+j}(n-j) u_{n-j},
// with the rest-operator contributions read off monomial by monomial.
// Resonant-but-compatible indices become free (Underdetermined), resonant
// incompatible ones obstruct; for m > 0 the image constraint f_0 = ... =
// f_{m-1} = 0 is enforced first. Every returned solution is re-checked by
// applying the operator (residual verification).
//
// solve_cauchy_2d converts the Cauchy problem into the automorphism equation
// for v = Dt^m u and solves the triangular system level by level with the
// reduced family P~_m(n, Dz).
//
// oracle_solve_* assemble the exact matrix of the truncated linear map and
// run Gaussian elimination over Q(i); they are deliberately independent of
// the recursion path and serve as a second route in tests.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "formaut/analysis.hpp"
#include "formaut/moment.hpp"
#include "formaut/newton.hpp"
#include "formaut/operators.hpp"
#include "formaut/scalar.hpp"
#include "formaut/series.hpp"
#include "formaut/spectral.hpp"

namespace formaut {

struct TruncationTooShort : std::invalid_argument {
    explicit TruncationTooShort(const std::string& what) : std::invalid_argument(what) {}
};

struct PositiveM : std::invalid_argument {
    explicit PositiveM(long m)
        : std::invalid_argument("kernel is trivial: lower ordinate m = " + std::to_string(m) +
                                " is positive") {}
};

struct ResonanceHit : std::runtime_error {
    explicit ResonanceHit(long n)
        : std::runtime_error("characteristic polynomial vanishes at n = " + std::to_string(n)),
          index(n) {}
    long index;
};

enum class SolveStatus { Unique, Underdetermined, Obstructed };

enum class Obstruction { None, ResonanceHit, ImageConstraint };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Unique: return "unique";
        case SolveStatus::Underdetermined: return "underdetermined";
        case SolveStatus::Obstructed: return "obstructed";
    }
    return "?";
}

struct SolveOutcome1 {
    SolveStatus status = SolveStatus::Unique;
    Series1 particular;                 // solution (Unique) or one solution
    std::vector<long> free_indices;     // initial data and compatible resonances
    std::vector<Series1> kernel_basis;  // one element per completable free index
    long failed_index = -1;
    Obstruction reason = Obstruction::None;
    long residual_order = -1;           // residual verified zero up to this order
};

namespace detail {

// Monomial view of an operator, split into the principal diagonal (points at
// height m) and the rest (strictly above).
struct Split1 {
    long m = 0;
    long max_order = 0;
    std::vector<std::pair<long, Scalar>> principal;      // (j, a_{j,j+m})
    std::vector<std::tuple<long, long, Scalar>> rest;    // (j, z-exponent, c)
};

inline Split1 split_operator(const Operator1& P) {
    Split1 s;
    s.m = polygon_1d(P).lower_ordinate;
    s.max_order = P.max_order();
    for (const auto& [j, a] : P.terms)
        for (const auto& [e, c] : a) {
            if (e - j == s.m)
                s.principal.emplace_back(j, c);
            else
                s.rest.emplace_back(j, e, c);
        }
    return s;
}

inline Scalar derivative_factor(long n, long j, const MomentSequence& mz) {
    if (j > n) return Scalar(0);
    if (mz.kind() == MomentSequence::Kind::Factorial)
        return Scalar(falling_factorial_value(n, j));
    return Scalar(mz.ratio_exact(n, j));
}

// W_m(n) as a value, moment-aware.
inline Scalar principal_value(const Split1& s, long n, const MomentSequence& mz) {
    Scalar acc;
    for (const auto& [j, c] : s.principal) acc += c * derivative_factor(n, j, mz);
    return acc;
}

struct RecursionResult {
    bool obstructed = false;
    long failed_index = -1;
    std::vector<Scalar> coeffs;
    std::vector<long> free_indices;
};

// The recursion itself. `f` may be null (homogeneous); `pinned` assigns
// values to free indices (unassigned free indices get zero).
inline RecursionResult run_recursion(const Split1& sp, const Series1* f, long N,
                                     const MomentSequence& mz,
                                     const std::map<long, Scalar>* pinned) {
    RecursionResult out;
    out.coeffs.assign(static_cast<size_t>(N) + 1, Scalar());
    auto pin = [&](long n) -> Scalar {
        if (!pinned) return Scalar();
        auto it = pinned->find(n);
        return it == pinned->end() ? Scalar() : it->second;
    };
    for (long n = 0; n <= N; ++n) {
        if (n < -sp.m) {  // initial data of the recursion: free
            out.free_indices.push_back(n);
            out.coeffs[static_cast<size_t>(n)] = pin(n);
            continue;
        }
        Scalar rhs = f ? (*f)[n + sp.m] : Scalar();
        for (const auto& [j, e, c] : sp.rest) {
            long idx = n + sp.m - e + j;
            if (idx < 0 || idx >= n) continue;
            Scalar factor = derivative_factor(idx, j, mz);
            if (!factor.is_zero()) rhs -= c * factor * out.coeffs[static_cast<size_t>(idx)];
        }
        Scalar w = principal_value(sp, n, mz);
        if (w.is_zero()) {
            if (rhs.is_zero()) {
                out.free_indices.push_back(n);  // resonant but compatible
                out.coeffs[static_cast<size_t>(n)] = pin(n);
                continue;
            }
            out.obstructed = true;
            out.failed_index = n;
            return out;
        }
        out.coeffs[static_cast<size_t>(n)] = rhs / w;
    }
    return out;
}

// Residual to the tight order: output coefficient i is fully determined by
// u_0..u_N exactly when i <= N + m (per-monomial validity), which reaches
// further than the conservative apply1 claim of N - max_order.
inline long checked_residual_order(const Operator1& P, const Series1& u, const Series1& f,
                                   const MomentSequence& mz) {
    long m = polygon_1d(P).lower_ordinate;
    long order = std::min(u.truncation() + m, f.truncation());
    if (order < 0) return -1;
    for (long i = 0; i <= order; ++i) {
        Scalar acc;
        for (const auto& [j, a] : P.terms)
            for (const auto& [e, c] : a) {
                long idx = i - e + j;
                if (idx < 0 || idx > u.truncation()) continue;
                Scalar factor = derivative_factor(idx, j, mz);
                if (!factor.is_zero()) acc += c * factor * u[idx];
            }
        if (acc != f[i])
            throw std::logic_error("solver residual check failed at order " + std::to_string(i));
    }
    return order;
}

}  // namespace detail

// Core recursion. f must carry at least N + m coefficients (m = lower
// ordinate, when positive). `pinned` optionally prescribes values for free
// indices of the particular solution.
inline SolveOutcome1 solve_1d(const Operator1& P, const Series1& f, long N,
                              const MomentSequence& mz = MomentSequence::factorial(),
                              const std::map<long, Scalar>* pinned = nullptr) {
    if (P.empty()) throw EmptyOperatorError();
    if (N < 0) throw std::invalid_argument("negative target truncation");
    detail::Split1 sp = detail::split_operator(P);

    if (f.truncation() < N + sp.m)
        throw TruncationTooShort("solve_1d needs f up to order " + std::to_string(N + sp.m) +
                                 ", got " + std::to_string(f.truncation()));

    SolveOutcome1 out;
    out.particular = Series1(N);

    // Image constraint: for m > 0 the image is z^m C[[z]].
    for (long i = 0; i < sp.m && i <= f.truncation(); ++i) {
        if (!f[i].is_zero()) {
            out.status = SolveStatus::Obstructed;
            out.failed_index = i;
            out.reason = Obstruction::ImageConstraint;
            return out;
        }
    }

    detail::RecursionResult r = detail::run_recursion(sp, &f, N, mz, pinned);
    if (r.obstructed) {
        out.status = SolveStatus::Obstructed;
        out.failed_index = r.failed_index;
        out.reason = Obstruction::ResonanceHit;
        return out;
    }
    for (long n = 0; n <= N; ++n) out.particular[n] = r.coeffs[static_cast<size_t>(n)];
    out.free_indices = r.free_indices;

    // One kernel element per free index, generated by the homogeneous
    // recursion from the unit choice at that index. A direction whose
    // continuation hits an incompatible resonance is not a kernel element
    // and is omitted.
    for (long fi : out.free_indices) {
        std::map<long, Scalar> unit{{fi, Scalar(1)}};
        detail::RecursionResult k = detail::run_recursion(sp, nullptr, N, mz, &unit);
        if (!k.obstructed) out.kernel_basis.push_back(Series1(k.coeffs));
    }

    out.status = out.free_indices.empty() ? SolveStatus::Unique : SolveStatus::Underdetermined;
    out.residual_order = detail::checked_residual_order(P, out.particular, f, mz);
    return out;
}

// Kernel basis for m <= 0 (and the resonant-compatible directions at m = 0).
inline std::vector<Series1> kernel_basis(const Operator1& P, long N,
                                         const MomentSequence& mz = MomentSequence::factorial()) {
    long m = polygon_1d(P).lower_ordinate;
    if (m > 0) throw PositiveM(m);
    SolveOutcome1 o = solve_1d(P, Series1(std::max<long>(N + m, 0)), N, mz);
    if (o.status == SolveStatus::Obstructed) throw ResonanceHit(o.failed_index);
    return o.kernel_basis;
}

// ---------------------------------------------------------------------------
// Truncated-matrix oracle (independent route).

struct OracleOutcome {
    enum class Status { Unique, Underdetermined, Inconsistent } status = Status::Unique;
    std::vector<Scalar> particular;            // column vector of unknowns
    std::vector<std::vector<Scalar>> kernel;   // basis of the section kernel
    long rank = 0;
    long rows = 0, cols = 0;
    long inconsistent_row = -1;

    long ker_dim() const { return cols - rank; }
    long coker_dim() const { return rows - rank; }
};

namespace detail {

// Row-reduce [A | b] exactly over Q(i).
inline OracleOutcome solve_linear_system(std::vector<std::vector<Scalar>>& A,
                                         std::vector<Scalar>& b) {
    OracleOutcome out;
    long rows = static_cast<long>(A.size());
    long cols = rows ? static_cast<long>(A[0].size()) : 0;
    out.rows = rows;
    out.cols = cols;

    std::vector<long> pivot_row_of_col(static_cast<size_t>(cols), -1);
    long r = 0;
    for (long c = 0; c < cols && r < rows; ++c) {
        long pr = -1;
        for (long i = r; i < rows; ++i)
            if (!A[static_cast<size_t>(i)][static_cast<size_t>(c)].is_zero()) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(A[static_cast<size_t>(pr)], A[static_cast<size_t>(r)]);
        std::swap(b[static_cast<size_t>(pr)], b[static_cast<size_t>(r)]);
        Scalar inv = Scalar(1) / A[static_cast<size_t>(r)][static_cast<size_t>(c)];
        for (long cc = c; cc < cols; ++cc)
            A[static_cast<size_t>(r)][static_cast<size_t>(cc)] *= inv;
        b[static_cast<size_t>(r)] = b[static_cast<size_t>(r)] * inv;
        for (long i = 0; i < rows; ++i) {
            if (i == r) continue;
            Scalar factor = A[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (factor.is_zero()) continue;
            for (long cc = c; cc < cols; ++cc)
                A[static_cast<size_t>(i)][static_cast<size_t>(cc)] -=
                    factor * A[static_cast<size_t>(r)][static_cast<size_t>(cc)];
            b[static_cast<size_t>(i)] -= factor * b[static_cast<size_t>(r)];
        }
        pivot_row_of_col[static_cast<size_t>(c)] = r;
        ++r;
    }
    out.rank = r;

    for (long i = r; i < rows; ++i)
        if (!b[static_cast<size_t>(i)].is_zero()) {
            out.status = OracleOutcome::Status::Inconsistent;
            out.inconsistent_row = i;
            return out;
        }

    out.particular.assign(static_cast<size_t>(cols), Scalar());
    for (long c = 0; c < cols; ++c)
        if (pivot_row_of_col[static_cast<size_t>(c)] >= 0)
            out.particular[static_cast<size_t>(c)] =
                b[static_cast<size_t>(pivot_row_of_col[static_cast<size_t>(c)])];

    for (long c = 0; c < cols; ++c) {
        if (pivot_row_of_col[static_cast<size_t>(c)] >= 0) continue;
        std::vector<Scalar> k(static_cast<size_t>(cols), Scalar());
        k[static_cast<size_t>(c)] = Scalar(1);
        for (long cc = 0; cc < cols; ++cc) {
            long prow = pivot_row_of_col[static_cast<size_t>(cc)];
            if (prow >= 0)
                k[static_cast<size_t>(cc)] = -A[static_cast<size_t>(prow)][static_cast<size_t>(c)];
        }
        out.kernel.push_back(std::move(k));
    }
    out.status = out.kernel.empty() ? OracleOutcome::Status::Unique
                                    : OracleOutcome::Status::Underdetermined;
    return out;
}

}  // namespace detail

// Exact finite section of P acting on coefficient vectors u_0..u_N. Output
// rows are the coefficient indices fully determined by those unknowns,
// 0..N+m (m = lower ordinate).
inline OracleOutcome oracle_solve_1d(const Operator1& P, const Series1& f, long N,
                                     const MomentSequence& mz = MomentSequence::factorial()) {
    if (P.empty()) throw EmptyOperatorError();
    long m = polygon_1d(P).lower_ordinate;
    long nrows = std::max<long>(N + m + 1, 0);
    if (f.truncation() < nrows - 1)
        throw TruncationTooShort("oracle needs f up to order " + std::to_string(nrows - 1));
    std::vector<std::vector<Scalar>> A(static_cast<size_t>(nrows),
                                       std::vector<Scalar>(static_cast<size_t>(N) + 1));
    std::vector<Scalar> b(static_cast<size_t>(nrows));
    for (long i = 0; i < nrows; ++i) b[static_cast<size_t>(i)] = f[i];
    for (const auto& [j, a] : P.terms)
        for (const auto& [e, c] : a)
            for (long n = 0; n <= N; ++n) {
                long i = n - j + e;
                if (i < 0 || i >= nrows) continue;
                Scalar factor = detail::derivative_factor(n, j, mz);
                if (!factor.is_zero()) A[static_cast<size_t>(i)][static_cast<size_t>(n)] += c * factor;
            }
    return detail::solve_linear_system(A, b);
}

// Exact finite section of P Dt^{-m} on coefficient grids u_{n,k},
// n <= N_t, k <= N_z. Flattened column index n * (N_z+1) + k.
inline OracleOutcome oracle_solve_2d(const Operator2& P, long m, const Series2& f, long N_t,
                                     long N_z,
                                     const MomentSequence& mt = MomentSequence::factorial(),
                                     const MomentSequence& mz = MomentSequence::factorial()) {
    if (P.empty()) throw EmptyOperatorError();
    if (m < 0) throw NegativeM(m);
    // z-direction knowledge shift: min over monomials of (z-exp - r).
    long lz = 0;
    bool first = true;
    for (const auto& [jr, a] : P.terms)
        for (const auto& [key, c] : a) {
            long v = key.second - jr.second;
            if (first || v < lz) lz = v;
            first = false;
        }
    long rows_t = N_t + 1;
    long rows_z = N_z + std::min<long>(lz, 0) + 1;
    if (rows_z <= 0) throw TruncationTooShort("z-truncation too small for this operator");
    if (f.truncation_t() < rows_t - 1 || f.truncation_z() < rows_z - 1)
        throw TruncationTooShort("oracle needs f up to (" + std::to_string(rows_t - 1) + ", " +
                                 std::to_string(rows_z - 1) + ")");

    long cols = (N_t + 1) * (N_z + 1);
    long nrows = rows_t * rows_z;
    std::vector<std::vector<Scalar>> A(static_cast<size_t>(nrows),
                                       std::vector<Scalar>(static_cast<size_t>(cols)));
    std::vector<Scalar> b(static_cast<size_t>(nrows));
    for (long i = 0; i < rows_t; ++i)
        for (long h = 0; h < rows_z; ++h)
            b[static_cast<size_t>(i * rows_z + h)] = f[i][h];

    for (const auto& [jr, a] : P.terms) {
        const auto [j, r] = jr;
        for (const auto& [key, c] : a) {
            const auto [nu, ze] = key;
            for (long n = 0; n <= N_t; ++n) {
                // t-factor of Dt^j Dt^{-m} on t^n: m_n / m_{n+m-j}, zero when
                // n + m - j < 0.
                if (n + m - j < 0) continue;
                Scalar tf;
                if (j >= m)
                    tf = detail::derivative_factor(n, j - m, mt);
                else
                    tf = Scalar(Rational(1) / mt.ratio_exact(n + m - j, m - j));
                if (tf.is_zero()) continue;
                long i = n + m - j + nu;
                if (i < 0 || i >= rows_t) continue;
                for (long k = 0; k <= N_z; ++k) {
                    Scalar kf = detail::derivative_factor(k, r, mz);
                    if (kf.is_zero()) continue;
                    long h = k - r + ze;
                    if (h < 0 || h >= rows_z) continue;
                    A[static_cast<size_t>(i * rows_z + h)][static_cast<size_t>(n * (N_z + 1) + k)] +=
                        c * tf * kf;
                }
            }
        }
    }
    return detail::solve_linear_system(A, b);
}

// ---------------------------------------------------------------------------
// Two-variable Cauchy solver.

struct SolveOutcome2 {
    SolveStatus status = SolveStatus::Unique;
    Series2 particular;
    std::vector<std::pair<long, long>> free_indices;  // (level n, z-index k) of v = Dt^m u
    std::vector<Series2> kernel_basis;                // u-directions for the free indices
    long failed_level = -1;
    long failed_index = -1;
    Obstruction reason = Obstruction::None;
    std::map<long, SolveStatus> per_level;            // n -> 1D outcome
    long residual_order_t = -1, residual_order_z = -1;
};

namespace detail {

// Contribution of v_src t^src through Q Dt^{-m} to the rhs accumulators of
// the later levels (Q = P minus its principal Dt-slice).
inline void accumulate_rest(const Operator2& P, long m, long src, const Series1& v_src,
                            std::vector<Series1>& acc, std::vector<long>& acc_valid,
                            const MomentSequence& mt, const MomentSequence& mz) {
    for (const auto& [jr, a] : P.terms) {
        const auto [j, r] = jr;
        for (const auto& [key, c] : a) {
            const auto [nu, ze] = key;
            if (j - nu == m) continue;  // principal slice, not part of Q
            if (src + m - j < 0) continue;
            long dest = src + m - j + nu;
            if (dest < 0 || dest >= static_cast<long>(acc.size())) continue;
            Scalar tf;
            if (j >= m)
                tf = derivative_factor(src, j - m, mt);
            else
                tf = Scalar(Rational(1) / mt.ratio_exact(src + m - j, m - j));
            if (tf.is_zero()) continue;
            Series1 d = mz.kind() == MomentSequence::Kind::Factorial ? derive(v_src, r)
                                                                     : moment_derive(mz, v_src, r);
            Series1 contrib = poly_mul_series(Poly1{{ze, c * tf}}, d);
            Series1& slot = acc[static_cast<size_t>(dest)];
            long upto = std::min(slot.truncation(), contrib.truncation());
            for (long kk = 0; kk <= upto; ++kk) slot[kk] += contrib[kk];
            acc_valid[static_cast<size_t>(dest)] =
                std::min(acc_valid[static_cast<size_t>(dest)], upto);
        }
    }
}

struct Cascade2Result {
    bool obstructed = false;
    long failed_level = -1;
    long failed_index = -1;
    Obstruction reason = Obstruction::None;
    std::vector<Series1> v;                           // per-level coefficients of v
    std::vector<std::pair<long, long>> free_indices;  // free (level, z-index)
    std::map<long, SolveStatus> per_level;
};

// Runs the triangular cascade for P Dt^{-m} v = g. `g` must be valid to
// z-order >= N_z + (N_t - n) * max_r at every level n. `pin` optionally sets
// one free coefficient to 1 (kernel directions); all other free choices are
// zero.
inline Cascade2Result run_cascade(const Operator2& P, long m, const ReducedFamily& fam,
                                  const std::vector<Series1>& g, long N_t, long N_z, long maxr,
                                  const std::optional<std::pair<long, long>>& pin,
                                  const MomentSequence& mt, const MomentSequence& mz) {
    long z_room = N_z + (N_t + 1) * maxr + 1;
    Cascade2Result out;
    out.v.assign(static_cast<size_t>(N_t) + 1, Series1(0));
    std::vector<Series1> acc(static_cast<size_t>(N_t) + 1, Series1(z_room));
    std::vector<long> acc_valid(static_cast<size_t>(N_t) + 1, z_room);

    for (long n = 0; n <= N_t; ++n) {
        long target_z = N_z + (N_t - n) * maxr;
        long avail = std::min({target_z, acc_valid[static_cast<size_t>(n)],
                               g[static_cast<size_t>(n)].truncation()});
        if (avail < N_z)
            throw TruncationTooShort("level " + std::to_string(n) +
                                     " lost too many z-orders in the cascade");
        Series1 rhs(avail);
        for (long kk = 0; kk <= avail; ++kk)
            rhs[kk] = g[static_cast<size_t>(n)][kk] - acc[static_cast<size_t>(n)][kk];

        Operator1 member = fam.specialize(n, mt);
        std::map<long, Scalar> pin_map;
        const std::map<long, Scalar>* pin_ptr = nullptr;
        if (pin && pin->first == n) {
            pin_map.emplace(pin->second, Scalar(1));
            pin_ptr = &pin_map;
        }
        if (member.empty()) {
            // 0 * v_n = rhs: free when rhs vanishes, obstructed otherwise.
            if (rhs.is_zero()) {
                out.per_level[n] = SolveStatus::Underdetermined;
                for (long kk = 0; kk <= std::min(avail, N_z); ++kk)
                    out.free_indices.emplace_back(n, kk);
                Series1 vn(avail);
                if (pin && pin->first == n && pin->second <= avail) vn[pin->second] = Scalar(1);
                out.v[static_cast<size_t>(n)] = vn;
            } else {
                out.obstructed = true;
                out.failed_level = n;
                out.failed_index = rhs.ord().value_or(0);
                out.reason = Obstruction::ImageConstraint;
                out.per_level[n] = SolveStatus::Obstructed;
                return out;
            }
        } else {
            long member_m = polygon_1d(member).lower_ordinate;
            long solve_to = std::max<long>(avail - std::max<long>(member_m, 0), 0);
            SolveOutcome1 o1 = solve_1d(member, rhs, solve_to, mz, pin_ptr);
            out.per_level[n] = o1.status;
            if (o1.status == SolveStatus::Obstructed) {
                out.obstructed = true;
                out.failed_level = n;
                out.failed_index = o1.failed_index;
                out.reason = o1.reason;
                return out;
            }
            for (long k : o1.free_indices)
                if (k <= N_z) out.free_indices.emplace_back(n, k);
            out.v[static_cast<size_t>(n)] = o1.particular;
        }
        accumulate_rest(P, m, n, out.v[static_cast<size_t>(n)], acc, acc_valid, mt, mz);
    }
    return out;
}

}  // namespace detail

// Solve P(Dt,Dz) u = f with Dt^j u(0,z) = phi_j for j < m, where m equals
// max(j - ord_t(a_jr)) over the operator (validated). f and the initial data
// are exact polynomials; they are materialized at whatever internal
// truncation the triangular cascade needs.
inline SolveOutcome2 solve_cauchy_2d(const Operator2& P, long m, const Poly2& f_poly,
                                     const std::vector<Poly1>& phi, long N_t, long N_z,
                                     const MomentSequence& mt = MomentSequence::factorial(),
                                     const MomentSequence& mz = MomentSequence::factorial()) {
    ReducedFamily fam = reduce_to_family(P);
    if (fam.m != m)
        throw std::invalid_argument("m = " + std::to_string(m) +
                                    " does not match the operator's principal t-order " +
                                    std::to_string(fam.m));
    if (static_cast<long>(phi.size()) != m)
        throw std::invalid_argument("expected " + std::to_string(m) + " initial data entries, got " +
                                    std::to_string(phi.size()));

    long maxr = P.max_order_z();
    long z_room = N_z + (N_t + 1) * maxr + 1;

    // w carries the initial data: Dt^j w(0, z) = phi_j.
    Poly2 w_poly;
    for (long j = 0; j < m; ++j) {
        Rational inv_m = Rational(1) / mt.value_exact(j);
        for (const auto& [e, c] : phi[static_cast<size_t>(j)])
            poly2_add_term(w_poly, j, e, c * Scalar(inv_m));
    }

    // g = f - P w, exact; v = Dt^m u solves P Dt^{-m} v = g.
    Series2 w_series = to_series2(w_poly, N_t + P.max_order_t(), z_room + P.max_order_z());
    Series2 pw = apply2(P, w_series, mt, mz);
    std::vector<Series1> g;
    g.reserve(static_cast<size_t>(N_t) + 1);
    for (long n = 0; n <= N_t; ++n) {
        Series1 gn(z_room);
        for (const auto& [key, c] : f_poly)
            if (key.first == n && key.second <= z_room) gn[key.second] += c;
        if (n <= pw.truncation_t())
            for (long kk = 0; kk <= std::min<long>(z_room, pw.truncation_z()); ++kk)
                gn[kk] -= pw[n][kk];
        g.push_back(std::move(gn));
    }

    detail::Cascade2Result cas =
        detail::run_cascade(P, m, fam, g, N_t, N_z, maxr, std::nullopt, mt, mz);
    SolveOutcome2 out;
    out.per_level = cas.per_level;
    out.free_indices = cas.free_indices;
    if (cas.obstructed) {
        out.status = SolveStatus::Obstructed;
        out.failed_level = cas.failed_level;
        out.failed_index = cas.failed_index;
        out.reason = cas.reason;
        return out;
    }

    // u = Dt^{-m} v + w.
    auto assemble_u = [&](const std::vector<Series1>& v, bool with_w) -> Series2 {
        std::vector<Series1> u_coeffs;
        for (long n = 0; n <= N_t; ++n) {
            Series1 un(N_z);
            if (n >= m) {
                Rational inv = Rational(1) / mt.ratio_exact(n, m);
                const Series1& vn = v[static_cast<size_t>(n - m)];
                for (long kk = 0; kk <= N_z && kk <= vn.truncation(); ++kk)
                    un[kk] = vn[kk] * Scalar(inv);
            }
            if (with_w)
                for (const auto& [key, c] : w_poly)
                    if (key.first == n && key.second <= N_z) un[key.second] += c;
            u_coeffs.push_back(std::move(un));
        }
        return Series2(std::move(u_coeffs));
    };
    out.particular = assemble_u(cas.v, true);

    // Kernel directions: re-run the homogeneous cascade with a unit choice at
    // each free index.
    if (!out.free_indices.empty()) {
        std::vector<Series1> zero_g(static_cast<size_t>(N_t) + 1, Series1(z_room));
        for (const auto& fi : out.free_indices) {
            detail::Cascade2Result kr =
                detail::run_cascade(P, m, fam, zero_g, N_t, N_z, maxr, fi, mt, mz);
            if (!kr.obstructed) out.kernel_basis.push_back(assemble_u(kr.v, false));
        }
        out.status = SolveStatus::Underdetermined;
    }

    // Residual verification against the original problem. At truncations
    // below the operator orders no output coefficient is verifiable.
    if (N_t >= P.max_order_t() && N_z >= P.max_order_z()) {
        Series2 pu = apply2(P, out.particular, mt, mz);
        for (long n = 0; n <= pu.truncation_t(); ++n)
            for (long kk = 0; kk <= pu.truncation_z(); ++kk) {
                Scalar expect;
                auto it = f_poly.find({n, kk});
                if (it != f_poly.end()) expect = it->second;
                if (pu[n][kk] != expect)
                    throw std::logic_error("2D solver residual check failed at (" +
                                           std::to_string(n) + ", " + std::to_string(kk) + ")");
            }
        out.residual_order_t = pu.truncation_t();
        out.residual_order_z = pu.truncation_z();
    }

    // Initial data check: Dt^j u(0, z) = phi_j exactly.
    for (long j = 0; j < m && j <= N_t; ++j) {
        Scalar mj(mt.value_exact(j));
        for (long kk = 0; kk <= N_z; ++kk) {
            Scalar expect = poly_coeff(phi[static_cast<size_t>(j)], kk);
            if (out.particular[j][kk] * mj != expect)
                throw std::logic_error("2D solver initial-data check failed");
        }
    }
    return out;
}

}  // namespace formaut
