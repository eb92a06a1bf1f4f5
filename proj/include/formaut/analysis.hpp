#pragma once

// Automorphism checkers: assemble Newton-polygon, principal-part and resonance
// facts into automorphism verdicts.
//
//   check_formal_1d  — P(Dz) on C[[z]]          (lower ordinate 0 + non-resonance)
//   check_gevrey_1d  — extension to Gevrey-s    (adds the first-slope condition)
//   check_formal_1d_moment — moment derivatives (pointwise generalized W)
//   check_formal_2d  — P(Dt,Dz) Dt^{-m} on C[[t,z]] via the reduced family
//   check_gevrey_2d  — extension to Gevrey-s in t
//
// The two-variable conditions quantify over every n in N_0. For classical
// derivatives this is made finite and exact: the falling-factorial factors
// kill terms only for n < n_stable, and for n >= n_stable the family's
// coefficients are polynomials in n, so the polygon can only deviate from
// the generic one at integer roots of finitely many leading coefficients.
// Those suspects are enumerated exactly. For moment derivatives the checks
// are certificate-based (positive moment ratios preserve uniform signs) with
// a bounded scan as fallback, reported as ConditionalYes.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "formaut/moment.hpp"
#include "formaut/newton.hpp"
#include "formaut/operators.hpp"
#include "formaut/scalar.hpp"
#include "formaut/spectral.hpp"

namespace formaut {

struct ConditionA {
    bool pass = false;
    bool undecided = false;
    long measured_ordinate = 0;          // 1D: m; 2D: generic family ordinate
    std::optional<long> witness_n;       // 2D: an n whose polygon fails
    std::optional<long> witness_ordinate;
    long scanned_to = -1;                // bounded scans only
};

struct ConditionC {
    bool pass = false;
    bool undecided = false;
    Rational s;
    std::optional<Rational> measured_slope;  // nullopt = vertical
    std::optional<long> witness_n;           // 2D
    long scanned_to = -1;
};

enum class Verdict { Yes, No, ConditionalYes };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        case Verdict::ConditionalYes: return "conditional_yes";
    }
    return "?";
}

struct AutomorphismReport {
    std::string space;
    ConditionA condition_a;
    ResonanceVerdict condition_b;
    std::optional<ConditionC> condition_c;
    Verdict verdict = Verdict::No;
    std::string no_reason;
    long conditional_bound = -1;
    long index = 0;  // chi = -(lower ordinate); family ordinate in 2D
    bool is_fuchsian_principal = false;
    std::optional<long> ker_dim, coker_dim;                 // 1D, when certified
    std::vector<std::pair<long, long>> family_ordinates;    // 2D diagnostics (n, l_n)
};

struct ResonanceObstruction : std::runtime_error {
    explicit ResonanceObstruction(long n)
        : std::runtime_error("characteristic polynomial vanishes at n = " + std::to_string(n) +
                             "; the index formulas do not apply"),
          witness(n) {}
    long witness;
};

// ---------------------------------------------------------------------------
// One variable.

namespace detail {

// Gevrey slope condition: first positive slope >= 1/s; a vertical
// boundary (no positive slope) passes for every s, and s = 0 demands it.
inline bool slope_condition(const std::optional<Rational>& slope, const Rational& s) {
    if (!slope) return true;
    if (s == 0) return false;
    return *slope * s >= 1;
}

inline void fill_dimensions(AutomorphismReport& rep, const Operator1& P, long m) {
    ResonanceVerdict valid = nonneg_integer_roots(char_poly_1d(P), std::max<long>(0, -m));
    if (valid.holds()) {
        rep.ker_dim = std::max<long>(-m, 0);
        rep.coker_dim = std::max<long>(m, 0);
    }
}

}  // namespace detail

inline AutomorphismReport check_formal_1d(const Operator1& P) {
    AutomorphismReport rep;
    rep.space = "formal";
    NewtonPolygon np = polygon_1d(P);
    long m = np.lower_ordinate;

    rep.condition_a.pass = m == 0;
    rep.condition_a.measured_ordinate = m;
    rep.condition_b = nonneg_integer_roots(char_poly_at_level(P, 0));
    rep.index = -m;
    rep.is_fuchsian_principal = m == 0;
    detail::fill_dimensions(rep, P, m);

    if (rep.condition_a.pass && rep.condition_b.holds()) {
        rep.verdict = Verdict::Yes;
        rep.ker_dim = 0;
        rep.coker_dim = 0;
    } else {
        rep.verdict = Verdict::No;
        if (!rep.condition_a.pass)
            rep.no_reason = "lower ordinate " + std::to_string(m) + " is nonzero";
        else
            rep.no_reason = "resonance at n = " + std::to_string(rep.condition_b.witness[0]);
    }
    return rep;
}

inline AutomorphismReport check_gevrey_1d(const Operator1& P, const Rational& s) {
    if (s < 0) throw std::invalid_argument("Gevrey order s must be nonnegative");
    AutomorphismReport rep = check_formal_1d(P);
    rep.space = s == 0 ? "convergent" : "gevrey(s=" + to_string(s) + ")";
    NewtonPolygon np = polygon_1d(P);

    ConditionC cc;
    cc.s = s;
    cc.measured_slope = np.first_positive_slope();
    cc.pass = detail::slope_condition(cc.measured_slope, s);
    rep.condition_c = cc;

    if (rep.verdict == Verdict::Yes && !cc.pass) {
        rep.verdict = Verdict::No;
        rep.no_reason = "first positive slope " +
                        (cc.measured_slope ? to_string(*cc.measured_slope) : std::string("vertical")) +
                        " is below 1/s";
    }
    return rep;
}

// chi(P, C[[z]]) = -m, valid under non-resonance at the determined indices
// (W_m(n) != 0 for n >= max(0, -m)).
inline long index_1d(const Operator1& P) {
    long m = polygon_1d(P).lower_ordinate;
    ResonanceVerdict v = nonneg_integer_roots(char_poly_1d(P), std::max<long>(0, -m));
    if (!v.holds()) throw ResonanceObstruction(v.witness[0]);
    return -m;
}

// Moment variant of the formal check: condition (a) is the classical polygon;
// condition (b) evaluates the generalized characteristic polynomial
// W_{0,m}(n). Exact-kind ratios allow exact pointwise evaluation; uniform
// signs give a full certificate because moment ratios are positive.
inline AutomorphismReport check_formal_1d_moment(const Operator1& P, const MomentSequence& mseq,
                                            long n_bound) {
    if (n_bound < 0) throw std::invalid_argument("n_bound must be nonnegative");
    AutomorphismReport rep;
    rep.space = "formal";
    NewtonPolygon np = polygon_1d(P);
    long m = np.lower_ordinate;
    rep.condition_a.pass = m == 0;
    rep.condition_a.measured_ordinate = m;
    rep.index = -m;
    rep.is_fuchsian_principal = m == 0;

    if (mseq.kind() == MomentSequence::Kind::Factorial) {
        AutomorphismReport classical = check_formal_1d(P);
        classical.space = rep.space;
        return classical;
    }

    // Level-0 terms (j, leading coefficient a_{j,j}).
    std::vector<std::pair<long, Scalar>> level0;
    for (const auto& [j, a] : P.terms) {
        auto o = ord_z(a);
        if (o && *o - j == 0) level0.emplace_back(j, a.begin()->second);
    }

    auto evaluate_b = [&]() -> ResonanceVerdict {
        if (level0.empty()) return ResonanceVerdict::fails_at({0});
        long min_j = level0.front().first;
        if (min_j > 0) return ResonanceVerdict::fails_at({0});  // empty sum at n < min_j
        bool all_pos = true, all_neg = true;
        for (const auto& [j, c] : level0) {
            if (c.im != 0) { all_pos = all_neg = false; break; }
            if (c.re <= 0) all_pos = false;
            if (c.re >= 0) all_neg = false;
        }
        if (all_pos || all_neg) return ResonanceVerdict::holds_sign_uniform();
        long scan_limit = n_bound;
        if (mseq.kind() == MomentSequence::Kind::CustomTable)
            scan_limit = std::min<long>(scan_limit, static_cast<long>(mseq.table_size()) - 1);
        for (long n = 0; n <= scan_limit; ++n) {
            if (mseq.exact_ratios()) {
                Scalar acc;
                for (const auto& [j, c] : level0)
                    if (j <= n) acc += c * Scalar(mseq.ratio_exact(n, j));
                if (acc.is_zero()) return ResonanceVerdict::fails_at({n});
            } else {
                ComplexInterval acc = ComplexInterval::from_scalar(Scalar(0));
                for (const auto& [j, c] : level0)
                    if (j <= n)
                        acc = civ_add(acc, civ_mul_real(ComplexInterval::from_scalar(c),
                                                        mseq.ratio_interval(n, j)));
                if (!acc.excludes_zero()) return ResonanceVerdict::undecided_beyond(n);
            }
        }
        return ResonanceVerdict::undecided_beyond(scan_limit);
    };
    rep.condition_b = evaluate_b();

    if (!rep.condition_a.pass) {
        rep.verdict = Verdict::No;
        rep.no_reason = "lower ordinate " + std::to_string(m) + " is nonzero";
    } else if (rep.condition_b.fails()) {
        rep.verdict = Verdict::No;
        rep.no_reason = "resonance at n = " + std::to_string(rep.condition_b.witness[0]);
    } else if (rep.condition_b.undecided()) {
        rep.verdict = Verdict::ConditionalYes;
        rep.conditional_bound = rep.condition_b.bound;
    } else {
        rep.verdict = Verdict::Yes;
        rep.ker_dim = 0;
        rep.coker_dim = 0;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Two variables: the reduced family P~_m(n, Dz).

struct ReducedFamily {
    long m = 0;
    long n_stable = 0;  // all falling factors are nonzero for n >= n_stable
    // Principal Dt-slice: (j, r, A_{j,r}(z)) with A = a_{j,r,j-m} nonzero.
    std::vector<std::tuple<long, long, Poly1>> slices;
    bool moment_z = false;

    // P~_m(n, Dz) with vanished factors dropped; exact for exact-ratio mt.
    Operator1 specialize(long n, const MomentSequence& mt = MomentSequence::factorial()) const {
        Operator1 op;
        op.moment_z = moment_z;
        for (const auto& [j, r, A] : slices) {
            long d = j - m;
            if (n < d) continue;
            Scalar rho(mt.ratio_exact(n, d));
            for (const auto& [e, c] : A) op.add_term(r, e, c * rho);
        }
        return op;
    }

    std::vector<Operator1> exceptional(const MomentSequence& mt = MomentSequence::factorial()) const {
        std::vector<Operator1> out;
        for (long n = 0; n < n_stable; ++n) out.push_back(specialize(n, mt));
        return out;
    }

    // Classical stable view: r -> (z-exponent -> polynomial in n). Valid for
    // every n; for n >= n_stable no falling factor vanishes identically.
    std::map<long, std::map<long, CharPoly>> stable_coeffs() const {
        std::map<long, std::map<long, CharPoly>> out;
        for (const auto& [j, r, A] : slices) {
            CharPoly ff = falling_factorial_poly(j - m);
            for (const auto& [e, c] : A) {
                CharPoly& slot = out[r][e];
                slot = slot + c * ff;
            }
        }
        for (auto it = out.begin(); it != out.end();) {
            for (auto jt = it->second.begin(); jt != it->second.end();)
                jt = jt->second.is_zero() ? it->second.erase(jt) : std::next(jt);
            it = it->second.empty() ? out.erase(it) : std::next(it);
        }
        return out;
    }
};

inline ReducedFamily reduce_to_family(const Operator2& P) {
    auto [principal, m, lambda_m] = principal_part_2d(P);
    ReducedFamily fam;
    fam.m = m;
    fam.moment_z = P.moment_z;
    for (const auto& [jr, a] : P.terms) {
        auto o = ord_t(a);
        if (!o || jr.first - *o != m) continue;
        Poly1 A = slice_t(a, jr.first - m);
        fam.n_stable = std::max(fam.n_stable, jr.first - m);
        fam.slices.emplace_back(jr.first, jr.second, std::move(A));
    }
    return fam;
}

namespace detail {

// Polygon facts for one member of the family.
struct MemberFacts {
    bool empty = false;
    bool undecided = false;  // moment intervals could not certify an ord
    long ordinate = 0;
    std::optional<Rational> slope;
};

inline MemberFacts member_facts(const Operator1& op) {
    MemberFacts f;
    if (op.empty()) {
        f.empty = true;
        return f;
    }
    NewtonPolygon np = polygon_1d(op);
    f.ordinate = np.lower_ordinate;
    f.slope = np.first_positive_slope();
    return f;
}

// Family polygon facts for a specific n when the t-moment sequence has no
// exact ratios (Gamma over k): per r, certify the order of vanishing by
// uniform signs or interval evaluation.
inline MemberFacts member_facts_interval(const ReducedFamily& fam, long n,
                                         const MomentSequence& mt) {
    MemberFacts f;
    std::map<long, std::set<long>> exps;  // r -> candidate z-exponents
    for (const auto& [j, r, A] : fam.slices) {
        if (n < j - fam.m) continue;
        for (const auto& [e, c] : A) exps[r].insert(e);
    }
    if (exps.empty()) {
        f.empty = true;
        return f;
    }
    std::vector<PolygonPoint> pts;
    for (const auto& [r, es] : exps) {
        std::optional<long> ordr;
        for (long e : es) {
            std::vector<Scalar> entries;
            for (const auto& [j, rr, A] : fam.slices) {
                if (rr != r || n < j - fam.m) continue;
                Scalar c = poly_coeff(A, e);
                if (!c.is_zero()) entries.push_back(c);
            }
            if (entries.empty()) continue;
            if (entries.size() == 1) {  // a single term cannot cancel
                ordr = e;
                break;
            }
            bool all_pos = true, all_neg = true, all_real = true;
            for (const auto& c : entries) {
                if (c.im != 0) all_real = false;
                if (c.re <= 0) all_pos = false;
                if (c.re >= 0) all_neg = false;
            }
            if (all_real && (all_pos || all_neg)) {
                ordr = e;  // positive ratios cannot cancel uniform signs
                break;
            }
            ComplexInterval acc = ComplexInterval::from_scalar(Scalar(0));
            for (const auto& [j, rr, A] : fam.slices) {
                if (rr != r || n < j - fam.m) continue;
                Scalar c = poly_coeff(A, e);
                if (c.is_zero()) continue;
                acc = civ_add(acc, civ_mul_real(ComplexInterval::from_scalar(c),
                                                mt.ratio_interval(n, j - fam.m)));
            }
            if (acc.excludes_zero()) {
                ordr = e;
                break;
            }
            f.undecided = true;  // straddles zero: cannot place this generator
            return f;
        }
        if (ordr) pts.push_back({r, *ordr - r});
    }
    if (pts.empty()) {
        f.empty = true;
        return f;
    }
    NewtonPolygon np = polygon_from_points(pts);
    f.ordinate = np.lower_ordinate;
    f.slope = np.first_positive_slope();
    return f;
}

// All integer roots of g in [from, Cauchy bound], exact.
inline std::vector<long> integer_roots_from(const CharPoly& g, long from) {
    std::vector<long> roots;
    if (g.is_zero()) return roots;
    long bound = integer_root_scan_bound(g);
    for (long n = std::max<long>(from, 0); n <= bound; ++n)
        if (g.eval(n).is_zero()) roots.push_back(n);
    return roots;
}

struct FamilyScan {
    ConditionA a;
    ConditionC c;
    long generic_l = 0;
    std::optional<Rational> generic_slope;
    bool generic_valid = false;
    std::vector<std::pair<long, long>> ordinates;  // (n, l_n) for inspected n
};

// Exact check of conditions (a) and, when `s` is set, (c) over every member
// of the classical family.
inline FamilyScan scan_family_classical(const ReducedFamily& fam,
                                        const std::optional<Rational>& s) {
    FamilyScan out;
    auto stable = fam.stable_coeffs();

    // Generic polygon: per r the smallest exponent whose n-polynomial is not
    // identically zero; deviations can occur only at its integer roots.
    std::set<long> suspects;
    for (long n = 0; n < fam.n_stable; ++n) suspects.insert(n);
    std::vector<PolygonPoint> generic_pts;
    for (const auto& [r, by_exp] : stable) {
        const auto& [e, g] = *by_exp.begin();
        generic_pts.push_back({r, e - r});
        for (long root : integer_roots_from(g, fam.n_stable)) suspects.insert(root);
    }
    NewtonPolygon generic = polygon_from_points(generic_pts);
    out.generic_l = generic.lower_ordinate;
    out.generic_slope = generic.first_positive_slope();
    out.generic_valid = true;

    bool a_ok = out.generic_l == 0;
    std::optional<long> a_witness;
    std::optional<long> a_witness_ord;
    if (!a_ok) {
        long n = fam.n_stable;
        while (suspects.count(n)) ++n;
        a_witness = n;
        a_witness_ord = out.generic_l;
    }
    bool c_ok = !s || slope_condition(out.generic_slope, *s);
    std::optional<long> c_witness;
    if (!c_ok && s) {
        long n = fam.n_stable;
        while (suspects.count(n)) ++n;
        c_witness = n;
    }

    for (long n : suspects) {
        MemberFacts f = member_facts(fam.specialize(n));
        if (f.empty) {
            // An empty member cannot be an automorphism; condition (a) fails
            // by convention.
            if (a_ok || (a_witness && n < *a_witness)) {
                a_ok = false;
                a_witness = n;
                a_witness_ord.reset();
            }
            out.ordinates.emplace_back(n, 0);
            continue;
        }
        out.ordinates.emplace_back(n, f.ordinate);
        if (f.ordinate != 0 && (a_ok || (a_witness && n < *a_witness))) {
            a_ok = false;
            a_witness = n;
            a_witness_ord = f.ordinate;
        }
        if (s && !slope_condition(f.slope, *s) && (c_ok || (c_witness && n < *c_witness))) {
            c_ok = false;
            c_witness = n;
        }
    }

    out.a.pass = a_ok;
    out.a.measured_ordinate = out.generic_l;
    out.a.witness_n = a_witness;
    out.a.witness_ordinate = a_witness_ord;
    if (s) {
        out.c.s = *s;
        out.c.pass = c_ok;
        out.c.measured_slope = out.generic_slope;
        out.c.witness_n = c_witness;
    }
    return out;
}

// Certificate-or-bounded check for moment families. Exceptional members are
// evaluated exactly (exact kinds) or via intervals; the stable regime is
// certified when each r has uniformly signed leading coefficients, otherwise
// scanned up to n_bound.
inline FamilyScan scan_family_moment(const ReducedFamily& fam, const MomentSequence& mt,
                                     const std::optional<Rational>& s, long n_bound) {
    FamilyScan out;
    bool a_ok = true, c_ok = true, undecided = false;
    std::optional<long> a_witness, c_witness;
    std::optional<long> a_witness_ord;

    auto inspect = [&](long n) {
        MemberFacts f;
        if (mt.exact_ratios()) {
            try {
                f = member_facts(fam.specialize(n, mt));
            } catch (const std::out_of_range&) {  // custom table exhausted
                undecided = true;
                return;
            }
        } else {
            f = member_facts_interval(fam, n, mt);
        }
        if (f.undecided) {
            undecided = true;
            return;
        }
        if (f.empty) {
            if (a_ok) { a_ok = false; a_witness = n; }
            out.ordinates.emplace_back(n, 0);
            return;
        }
        out.ordinates.emplace_back(n, f.ordinate);
        if (f.ordinate != 0 && a_ok) {
            a_ok = false;
            a_witness = n;
            a_witness_ord = f.ordinate;
        }
        if (s && !slope_condition(f.slope, *s) && c_ok) {
            c_ok = false;
            c_witness = n;
        }
    };

    for (long n = 0; n < fam.n_stable; ++n) inspect(n);

    // Stable regime: with all factors present and positive, uniform signs of
    // the leading z-coefficients certify every ord at once.
    std::map<long, std::set<long>> exps;
    for (const auto& [j, r, A] : fam.slices)
        for (const auto& [e, c] : A) exps[r].insert(e);
    bool certified = true;
    std::vector<PolygonPoint> stable_pts;
    for (const auto& [r, es] : exps) {
        std::optional<long> ordr;
        for (long e : es) {
            std::vector<Scalar> entries;
            for (const auto& [j, rr, A] : fam.slices) {
                if (rr != r) continue;
                Scalar c = poly_coeff(A, e);
                if (!c.is_zero()) entries.push_back(c);
            }
            if (entries.empty()) continue;
            if (entries.size() == 1) { ordr = e; break; }  // single term cannot cancel
            bool all_pos = true, all_neg = true, all_real = true;
            for (const auto& c : entries) {
                if (c.im != 0) all_real = false;
                if (c.re <= 0) all_pos = false;
                if (c.re >= 0) all_neg = false;
            }
            if (all_real && (all_pos || all_neg)) { ordr = e; break; }
            certified = false;
            break;
        }
        if (!certified) break;
        if (ordr) stable_pts.push_back({r, *ordr - r});
    }

    if (certified && !stable_pts.empty()) {
        NewtonPolygon stable = polygon_from_points(stable_pts);
        out.generic_l = stable.lower_ordinate;
        out.generic_slope = stable.first_positive_slope();
        out.generic_valid = true;
        if (stable.lower_ordinate != 0 && a_ok) {
            a_ok = false;
            a_witness = fam.n_stable;
            a_witness_ord = stable.lower_ordinate;
        }
        if (s && !slope_condition(stable.first_positive_slope(), *s) && c_ok) {
            c_ok = false;
            c_witness = fam.n_stable;
        }
    } else {
        long scan_limit = n_bound;
        if (mt.kind() == MomentSequence::Kind::CustomTable)
            scan_limit = std::min<long>(scan_limit, static_cast<long>(mt.table_size()) - 1);
        for (long n = fam.n_stable; n <= scan_limit && a_ok && c_ok; ++n) inspect(n);
        if (a_ok && c_ok) undecided = true;
        out.a.scanned_to = scan_limit;
        out.c.scanned_to = scan_limit;
    }

    out.a.pass = a_ok && !undecided;
    out.a.undecided = a_ok && undecided;
    out.a.measured_ordinate = out.generic_valid ? out.generic_l : 0;
    out.a.witness_n = a_witness;
    out.a.witness_ordinate = a_witness_ord;
    if (s) {
        out.c.s = *s;
        out.c.pass = c_ok && !undecided;
        out.c.undecided = c_ok && undecided;
        out.c.measured_slope = out.generic_slope;
        out.c.witness_n = c_witness;
    }
    return out;
}

// Non-resonance of W_{m,0}(n,k,0) for moment sequences, pointwise.
inline ResonanceVerdict nonresonance_2d_moment(const ReducedFamily& fam, const MomentSequence& mt,
                                               const MomentSequence& mz, long n_bound) {
    // Level-0 terms of the family: (d = j-m, r, leading coefficient at z^r).
    std::vector<std::tuple<long, long, Scalar>> level0;
    for (const auto& [j, r, A] : fam.slices) {
        auto o = ord_z(A);
        if (o && *o - r == 0) level0.emplace_back(j - fam.m, r, A.begin()->second);
    }
    if (level0.empty()) return ResonanceVerdict::fails_at({0, 0});

    bool has_origin = false;
    bool all_pos = true, all_neg = true, all_real = true;
    for (const auto& [d, r, c] : level0) {
        if (d == 0 && r == 0) has_origin = true;
        if (c.im != 0) all_real = false;
        if (c.re <= 0) all_pos = false;
        if (c.re >= 0) all_neg = false;
    }
    if (!has_origin) return ResonanceVerdict::fails_at({0, 0});
    if (all_real && (all_pos || all_neg)) return ResonanceVerdict::holds_sign_uniform();

    long scan_n = n_bound, scan_k = n_bound;
    if (mt.kind() == MomentSequence::Kind::CustomTable)
        scan_n = std::min<long>(scan_n, static_cast<long>(mt.table_size()) - 1);
    if (mz.kind() == MomentSequence::Kind::CustomTable)
        scan_k = std::min<long>(scan_k, static_cast<long>(mz.table_size()) - 1);
    for (long n = 0; n <= scan_n; ++n)
        for (long k = 0; k <= scan_k; ++k) {
            if (mt.exact_ratios() && mz.exact_ratios()) {
                Scalar acc;
                for (const auto& [d, r, c] : level0)
                    if (d <= n && r <= k)
                        acc += c * Scalar(mt.ratio_exact(n, d) * mz.ratio_exact(k, r));
                if (acc.is_zero()) return ResonanceVerdict::fails_at({n, k});
            } else {
                ComplexInterval acc = ComplexInterval::from_scalar(Scalar(0));
                for (const auto& [d, r, c] : level0)
                    if (d <= n && r <= k)
                        acc = civ_add(acc,
                                      civ_mul_real(ComplexInterval::from_scalar(c),
                                                   iv_mul(mt.ratio_interval(n, d),
                                                          mz.ratio_interval(k, r))));
                if (!acc.excludes_zero()) return ResonanceVerdict::undecided_beyond(n);
            }
        }
    return ResonanceVerdict::undecided_beyond(std::min(scan_n, scan_k));
}

}  // namespace detail

inline AutomorphismReport check_formal_2d(const Operator2& P, long n_bound,
                                     const MomentSequence& mt = MomentSequence::factorial(),
                                     const MomentSequence& mz = MomentSequence::factorial()) {
    if (n_bound < 0) throw std::invalid_argument("n_bound must be nonnegative");
    ReducedFamily fam = reduce_to_family(P);
    bool classical = mt.kind() == MomentSequence::Kind::Factorial &&
                     mz.kind() == MomentSequence::Kind::Factorial;

    AutomorphismReport rep;
    rep.space = "formal2";

    detail::FamilyScan scan =
        classical ? detail::scan_family_classical(fam, std::nullopt)
                  : detail::scan_family_moment(fam, mt, std::nullopt, n_bound);
    rep.condition_a = scan.a;
    rep.family_ordinates = scan.ordinates;
    rep.index = scan.generic_valid ? -scan.generic_l : 0;

    if (classical) {
        CharPoly2 w;
        bool have_w = false;
        try {
            w = char_poly_2d(P, fam.m, 0);
            have_w = true;
        } catch (const EmptyPrincipalPart&) {
            have_w = false;
        }
        rep.condition_b =
            have_w ? nonresonance_2d(w, n_bound) : ResonanceVerdict::fails_at({0, 0});
    } else {
        rep.condition_b = detail::nonresonance_2d_moment(fam, mt, mz, n_bound);
    }

    bool any_fail = (!rep.condition_a.pass && !rep.condition_a.undecided) || rep.condition_b.fails();
    bool any_undecided = rep.condition_a.undecided || rep.condition_b.undecided();
    if (any_fail) {
        rep.verdict = Verdict::No;
        if (!rep.condition_a.pass && !rep.condition_a.undecided) {
            rep.no_reason = "family polygon ordinate is nonzero";
            if (rep.condition_a.witness_n)
                rep.no_reason += " at n = " + std::to_string(*rep.condition_a.witness_n);
        } else {
            rep.no_reason = "resonance at (n, k) = (" + std::to_string(rep.condition_b.witness[0]) +
                            ", " + std::to_string(rep.condition_b.witness[1]) + ")";
        }
    } else if (any_undecided) {
        rep.verdict = Verdict::ConditionalYes;
        rep.conditional_bound = n_bound;
    } else {
        rep.verdict = Verdict::Yes;
    }
    return rep;
}

inline AutomorphismReport check_gevrey_2d(const Operator2& P, const Rational& s, long n_bound,
                                     const MomentSequence& mt = MomentSequence::factorial(),
                                     const MomentSequence& mz = MomentSequence::factorial()) {
    if (s < 0) throw std::invalid_argument("Gevrey order s must be nonnegative");
    if (n_bound < 0) throw std::invalid_argument("n_bound must be nonnegative");
    ReducedFamily fam = reduce_to_family(P);
    bool classical = mt.kind() == MomentSequence::Kind::Factorial &&
                     mz.kind() == MomentSequence::Kind::Factorial;

    AutomorphismReport rep = check_formal_2d(P, n_bound, mt, mz);
    rep.space = "gevrey2(s=" + to_string(s) + ")";

    detail::FamilyScan scan = classical
                                  ? detail::scan_family_classical(fam, s)
                                  : detail::scan_family_moment(fam, mt, s, n_bound);
    rep.condition_c = scan.c;

    if (rep.verdict != Verdict::No) {
        if (!scan.c.pass && !scan.c.undecided) {
            rep.verdict = Verdict::No;
            rep.no_reason = "family polygon slope is below 1/s";
            if (scan.c.witness_n) rep.no_reason += " at n = " + std::to_string(*scan.c.witness_n);
        } else if (scan.c.undecided && rep.verdict == Verdict::Yes) {
            rep.verdict = Verdict::ConditionalYes;
            rep.conditional_bound = n_bound;
        }
    }
    return rep;
}

}  // namespace formaut
