#pragma once

// Newton polygons: convex hulls of translated second quadrants
// corner(a,b) = { x <= a, y >= b } attached to operator monomials.
//
// The unbounded polygon is represented by its finite vertex chain plus the
// implicit horizontal ray (y = lower ordinate) to the left of the first
// vertex and the vertical ray above the last. Chain slopes are strictly
// increasing and strictly positive.

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "formaut/operators.hpp"
#include "formaut/scalar.hpp"
#include "formaut/series.hpp"

namespace formaut {

struct EmptyInput : std::invalid_argument {
    EmptyInput() : std::invalid_argument("empty point set") {}
};

struct EmptyOperatorError : std::invalid_argument {
    EmptyOperatorError() : std::invalid_argument("empty operator") {}
};

struct NegativeM : std::invalid_argument {
    explicit NegativeM(long m)
        : std::invalid_argument("principal t-order m = " + std::to_string(m) +
                                " is negative; the two-variable theory assumes m >= 0") {}
};

struct PolygonPoint {
    long x, y;
    friend bool operator==(const PolygonPoint&, const PolygonPoint&) = default;
    friend auto operator<=>(const PolygonPoint&, const PolygonPoint&) = default;
};

class NewtonPolygon {
  public:
    std::vector<PolygonPoint> generators;  // deduplicated input points, sorted
    std::vector<PolygonPoint> chain;       // hull vertices, increasing positive slopes
    long lower_ordinate = 0;
    std::vector<Rational> slopes;          // between consecutive chain vertices

    // Smallest positive slope; nullopt encodes "vertical" (single-vertex
    // chain, the boundary jumps straight to the vertical ray).
    std::optional<Rational> first_positive_slope() const {
        if (slopes.empty()) return std::nullopt;
        return slopes.front();
    }

    long max_x() const { return chain.back().x; }

    // Height of the lower boundary at abscissa x (x <= max_x()).
    Rational envelope_at(long x) const {
        if (x > max_x()) throw std::out_of_range("envelope queried right of the polygon");
        if (x <= chain.front().x) return Rational(lower_ordinate);
        for (size_t i = 0; i + 1 < chain.size(); ++i) {
            if (x <= chain[i + 1].x) {
                Rational run(chain[i + 1].x - chain[i].x);
                Rational rise(chain[i + 1].y - chain[i].y);
                return Rational(chain[i].y) + rise * Rational(x - chain[i].x) / run;
            }
        }
        return Rational(chain.back().y);
    }

    // Boundary membership: on the horizontal ray, on a chain edge/vertex, or
    // on the vertical ray above the last vertex.
    bool on_boundary(long x, long y) const {
        if (x > max_x()) return false;
        if (x == max_x() && Rational(y) >= envelope_at(x)) return true;
        return Rational(y) == envelope_at(x);
    }

    friend bool operator==(const NewtonPolygon& a, const NewtonPolygon& b) {
        return a.chain == b.chain && a.lower_ordinate == b.lower_ordinate;
    }
};

inline NewtonPolygon polygon_from_points(const std::vector<PolygonPoint>& points) {
    if (points.empty()) throw EmptyInput();

    NewtonPolygon np;
    np.generators = points;
    std::sort(np.generators.begin(), np.generators.end());
    np.generators.erase(std::unique(np.generators.begin(), np.generators.end()),
                        np.generators.end());

    np.lower_ordinate = np.generators.front().y;
    for (const auto& p : np.generators) np.lower_ordinate = std::min(np.lower_ordinate, p.y);

    // Per abscissa only the lowest point matters (corner(x, y) grows as y
    // shrinks).
    std::vector<PolygonPoint> pts;
    for (const auto& p : np.generators) {
        if (!pts.empty() && pts.back().x == p.x) continue;  // generators sorted: min y first
        pts.push_back(p);
    }

    // Lower convex hull (strict turns; collinear middle points dropped).
    std::vector<PolygonPoint> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // keep b only if slope(a,b) < slope(b,p)
            long lhs = (b.y - a.y) * (p.x - b.x);
            long rhs = (p.y - b.y) * (b.x - a.x);
            if (lhs < rhs) break;
            hull.pop_back();
        }
        hull.push_back(p);
    }

    // Drop the leading part with non-positive slopes; it is absorbed by the
    // horizontal ray y = lower ordinate.
    size_t start = 0;
    while (start + 1 < hull.size() && hull[start + 1].y <= hull[start].y) ++start;
    np.chain.assign(hull.begin() + static_cast<long>(start), hull.end());

    for (size_t i = 0; i + 1 < np.chain.size(); ++i) {
        Rational s(np.chain[i + 1].y - np.chain[i].y, np.chain[i + 1].x - np.chain[i].x);
        s.canonicalize();
        np.slopes.push_back(s);
    }
    return np;
}

// Generators (j, ord_z(a_j) - j); terms with zero coefficient are absent by
// the Operator1 invariant.
inline NewtonPolygon polygon_1d(const Operator1& P) {
    if (P.empty()) throw EmptyOperatorError();
    std::vector<PolygonPoint> pts;
    for (const auto& [j, a] : P.terms) {
        auto o = ord_z(a);
        if (!o) continue;
        pts.push_back({j, *o - j});
    }
    if (pts.empty()) throw EmptyOperatorError();
    return polygon_from_points(pts);
}

// Generators (j + r, ord_t(a_jr) - j).
inline NewtonPolygon polygon_2d(const Operator2& P) {
    if (P.empty()) throw EmptyOperatorError();
    std::vector<PolygonPoint> pts;
    for (const auto& [jr, a] : P.terms) {
        auto o = ord_t(a);
        if (!o) continue;
        pts.push_back({jr.first + jr.second, *o - jr.first});
    }
    if (pts.empty()) throw EmptyOperatorError();
    return polygon_from_points(pts);
}

// ---------------------------------------------------------------------------
// Principal parts.

// m = lower ordinate; keeps the single monomial a_{j,j+m} z^{j+m} D^j for
// each j attaining the ordinate.
inline std::pair<Operator1, std::set<long>> principal_part_1d(const Operator1& P) {
    if (P.empty()) throw EmptyOperatorError();
    long m = 0;
    bool first = true;
    for (const auto& [j, a] : P.terms) {
        auto o = ord_z(a);
        if (!o) continue;
        long v = *o - j;
        if (first || v < m) m = v;
        first = false;
    }
    if (first) throw EmptyOperatorError();
    Operator1 out;
    out.moment_z = P.moment_z;
    std::set<long> lambda_m;
    for (const auto& [j, a] : P.terms) {
        auto o = ord_z(a);
        if (o && *o - j == m) {
            lambda_m.insert(j);
            out.add_term(j, j + m, a.begin()->second);
        }
    }
    return {out, lambda_m};
}

// Principal part with respect to Dt: m = max(j - ord_t(a_jr)) must be >= 0;
// keeps the t^{j-m} coefficient slice for (j, r) attaining m.
inline std::tuple<Operator2, long, std::set<std::pair<long, long>>> principal_part_2d(
    const Operator2& P) {
    if (P.empty()) throw EmptyOperatorError();
    long m = 0;
    bool first = true;
    for (const auto& [jr, a] : P.terms) {
        auto o = ord_t(a);
        if (!o) continue;
        long v = jr.first - *o;
        if (first || v > m) m = v;
        first = false;
    }
    if (first) throw EmptyOperatorError();
    if (m < 0) throw NegativeM(m);
    Operator2 out;
    out.moment_t = P.moment_t;
    out.moment_z = P.moment_z;
    std::set<std::pair<long, long>> lambda_m;
    for (const auto& [jr, a] : P.terms) {
        auto o = ord_t(a);
        if (o && jr.first - *o == m) {
            lambda_m.insert(jr);
            for (const auto& [ze, c] : slice_t(a, jr.first - m))
                out.add_term(jr.first, jr.second, jr.first - m, ze, c);
        }
    }
    return {out, m, lambda_m};
}

// ---------------------------------------------------------------------------
// Boundary reduction: keep only the monomials whose attached point lies on
// the polygon boundary. The result has the same polygon, principal part and
// characteristic polynomial.

inline Operator1 boundary_reduce_1d(const Operator1& P) {
    if (P.empty()) throw EmptyOperatorError();
    NewtonPolygon np = polygon_1d(P);
    Operator1 out;
    out.moment_z = P.moment_z;
    for (const auto& [j, a] : P.terms)
        for (const auto& [k, c] : a)
            if (np.on_boundary(j, k - j)) out.add_term(j, k, c);
    return out;
}

inline Operator2 boundary_reduce_2d(const Operator2& P) {
    if (P.empty()) throw EmptyOperatorError();
    NewtonPolygon np = polygon_2d(P);
    Operator2 out;
    out.moment_t = P.moment_t;
    out.moment_z = P.moment_z;
    for (const auto& [jr, a] : P.terms)
        for (const auto& [key, c] : a)
            if (np.on_boundary(jr.first + jr.second, key.first - jr.first))
                out.add_term(jr.first, jr.second, key.first, key.second, c);
    return out;
}

}  // namespace formaut
