#pragma once

// Report documents (deterministic JSON with stable field order) and polygon
// renderings (SVG / ASCII). Identical inputs produce byte-identical reports;
// timing is the only nondeterministic block and is dropped by --no-timing.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "formaut/analysis.hpp"
#include "formaut/gevrey.hpp"
#include "formaut/newton.hpp"
#include "formaut/problem.hpp"
#include "formaut/solver.hpp"
#include "formaut/spectral.hpp"

namespace formaut {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

namespace report {

inline Json polygon_json(const NewtonPolygon& np) {
    Json out;
    Json gens = Json::array();
    for (const auto& p : np.generators) gens.push_back(Json::array({p.x, p.y}));
    Json chain = Json::array();
    for (const auto& p : np.chain) chain.push_back(Json::array({p.x, p.y}));
    Json slopes = Json::array();
    for (const auto& s : np.slopes) slopes.push_back(to_string(s));
    out["generators"] = gens;
    out["chain"] = chain;
    out["lower_ordinate"] = np.lower_ordinate;
    out["slopes"] = slopes;
    auto fps = np.first_positive_slope();
    out["first_positive_slope"] = fps ? to_string(*fps) : "vertical";
    return out;
}

inline std::string char_poly_pretty(const CharPoly& w, const std::string& var) {
    if (w.is_zero()) return "0";
    std::string out;
    for (long i = 0; i <= w.degree(); ++i) {
        Scalar c = w.coeff(i);
        if (c.is_zero()) continue;
        if (!out.empty()) out += " + ";
        if (i == 0) {
            out += to_literal(c);
        } else {
            std::string pow = i == 1 ? var : var + "^" + std::to_string(i);
            if (c == Scalar(1))
                out += pow;
            else
                out += "(" + to_literal(c) + ")*" + pow;
        }
    }
    return out;
}

inline Json char_poly_json(const CharPoly& w, long level) {
    Json out;
    out["level"] = level;
    Json coeffs = Json::array();
    for (long i = 0; i <= w.degree(); ++i) coeffs.push_back(to_literal(w.coeff(i)));
    out["coefficients"] = coeffs;
    out["pretty"] = char_poly_pretty(w, "lambda");
    return out;
}

inline std::string char_poly_2d_pretty(const CharPoly2& w) {
    if (w.is_zero()) return "0";
    std::string out;
    for (const auto& [ij, c] : w.coeffs()) {
        if (!out.empty()) out += " + ";
        std::vector<std::string> parts;
        if (!(c == Scalar(1)) || (ij.first == 0 && ij.second == 0))
            parts.push_back(c.is_real() && c.re >= 0 ? to_literal(c) : "(" + to_literal(c) + ")");
        if (ij.first > 0)
            parts.push_back(ij.first == 1 ? "n" : "n^" + std::to_string(ij.first));
        if (ij.second > 0)
            parts.push_back(ij.second == 1 ? "k" : "k^" + std::to_string(ij.second));
        for (size_t h = 0; h < parts.size(); ++h) {
            if (h) out += "*";
            out += parts[h];
        }
    }
    return out;
}

inline Json char_poly_2d_json(const CharPoly2& w) {
    Json out;
    Json terms = Json::array();
    for (const auto& [ij, c] : w.coeffs())
        terms.push_back(Json::array({ij.first, ij.second, to_literal(c)}));
    out["terms"] = terms;
    out["pretty"] = char_poly_2d_pretty(w);
    return out;
}

inline Json resonance_json(const ResonanceVerdict& v) {
    Json out;
    switch (v.kind) {
        case ResonanceVerdict::Kind::Holds: out["kind"] = "holds"; break;
        case ResonanceVerdict::Kind::FailsAt: out["kind"] = "fails_at"; break;
        case ResonanceVerdict::Kind::UndecidedBeyond: out["kind"] = "undecided_beyond"; break;
    }
    switch (v.certificate) {
        case ResonanceVerdict::Certificate::None: break;
        case ResonanceVerdict::Certificate::SignUniform: out["certificate"] = "sign_uniform"; break;
        case ResonanceVerdict::Certificate::ExhaustiveRootBound:
            out["certificate"] = "exhaustive_root_bound";
            break;
    }
    if (!v.witness.empty()) out["witness"] = v.witness;
    if (v.kind != ResonanceVerdict::Kind::FailsAt) out["bound"] = v.bound;
    return out;
}

inline Json automorphism_json(const AutomorphismReport& rep) {
    Json out;
    out["space"] = rep.space;
    Json a;
    a["pass"] = rep.condition_a.pass;
    if (rep.condition_a.undecided) a["undecided"] = true;
    a["lower_ordinate"] = rep.condition_a.measured_ordinate;
    if (rep.condition_a.witness_n) a["witness_n"] = *rep.condition_a.witness_n;
    if (rep.condition_a.witness_ordinate) a["witness_ordinate"] = *rep.condition_a.witness_ordinate;
    if (rep.condition_a.scanned_to >= 0) a["scanned_to"] = rep.condition_a.scanned_to;
    out["condition_a"] = a;
    out["condition_b"] = resonance_json(rep.condition_b);
    if (rep.condition_c) {
        Json c;
        c["pass"] = rep.condition_c->pass;
        if (rep.condition_c->undecided) c["undecided"] = true;
        c["s"] = to_string(rep.condition_c->s);
        c["first_positive_slope"] =
            rep.condition_c->measured_slope ? to_string(*rep.condition_c->measured_slope)
                                            : "vertical";
        if (rep.condition_c->witness_n) c["witness_n"] = *rep.condition_c->witness_n;
        if (rep.condition_c->scanned_to >= 0) c["scanned_to"] = rep.condition_c->scanned_to;
        out["condition_c"] = c;
    }
    out["verdict"] = to_string(rep.verdict);
    if (!rep.no_reason.empty()) out["reason"] = rep.no_reason;
    if (rep.conditional_bound >= 0) out["certified_up_to"] = rep.conditional_bound;
    out["index"] = rep.index;
    out["fuchsian_principal"] = rep.is_fuchsian_principal;
    if (rep.ker_dim) out["ker_dim"] = *rep.ker_dim;
    if (rep.coker_dim) out["coker_dim"] = *rep.coker_dim;
    if (!rep.family_ordinates.empty()) {
        Json fam = Json::array();
        for (const auto& [n, l] : rep.family_ordinates) fam.push_back(Json::array({n, l}));
        out["family_ordinates"] = fam;
    }
    return out;
}

inline Json series1_json(const Series1& u) {
    Json arr = Json::array();
    for (long n = 0; n <= u.truncation(); ++n) arr.push_back(to_literal(u[n]));
    return arr;
}

inline Json series2_json(const Series2& u) {
    Json arr = Json::array();
    for (long n = 0; n <= u.truncation_t(); ++n) arr.push_back(series1_json(u[n]));
    return arr;
}

inline const char* obstruction_name(Obstruction o) {
    switch (o) {
        case Obstruction::None: return "none";
        case Obstruction::ResonanceHit: return "resonance_hit";
        case Obstruction::ImageConstraint: return "image_constraint";
    }
    return "?";
}

inline Json solution1_json(const SolveOutcome1& o) {
    Json out;
    out["status"] = to_string(o.status);
    if (o.status == SolveStatus::Obstructed) {
        out["failed_index"] = o.failed_index;
        out["reason"] = obstruction_name(o.reason);
        return out;
    }
    out["coefficients"] = series1_json(o.particular);
    if (o.status == SolveStatus::Underdetermined) {
        out["free_indices"] = o.free_indices;
        Json kb = Json::array();
        for (const auto& k : o.kernel_basis) kb.push_back(series1_json(k));
        out["kernel_basis"] = kb;
    }
    out["residual_order"] = o.residual_order;
    return out;
}

inline Json solution2_json(const SolveOutcome2& o) {
    Json out;
    out["status"] = to_string(o.status);
    Json per = Json::array();
    for (const auto& [n, st] : o.per_level) per.push_back(Json::array({n, to_string(st)}));
    if (o.status == SolveStatus::Obstructed) {
        out["failed_level"] = o.failed_level;
        out["failed_index"] = o.failed_index;
        out["reason"] = obstruction_name(o.reason);
        out["per_level"] = per;
        return out;
    }
    out["coefficients"] = series2_json(o.particular);
    if (o.status == SolveStatus::Underdetermined) {
        Json fi = Json::array();
        for (const auto& [n, k] : o.free_indices) fi.push_back(Json::array({n, k}));
        out["free_indices"] = fi;
        Json kb = Json::array();
        for (const auto& k : o.kernel_basis) kb.push_back(series2_json(k));
        out["kernel_basis"] = kb;
    }
    out["residual_order"] = Json{{"t", o.residual_order_t}, {"z", o.residual_order_z}};
    out["per_level"] = per;
    return out;
}

inline Json gevrey_json(const GevreyEstimate& est) {
    Json out;
    out["s_hat"] = est.s_hat;
    out["window"] = Json::array({est.window_lo, est.window_hi});
    out["fit_residual"] = est.residual;
    if (est.certificate) {
        Json c;
        c["C"] = to_string(est.certificate->C);
        c["A"] = to_string(est.certificate->A);
        c["s"] = to_string(est.certificate->s);
        c["verified_to"] = est.certificate->verified_to;
        out["bound_certificate"] = c;
    }
    return out;
}

inline Json problem_echo(const ProblemSpec& p) {
    Json out;
    out["dim"] = p.dim;
    out["operator"] = p.op1 ? pretty_print(*p.op1) : pretty_print(*p.op2);
    if (!p.params.empty()) {
        Json pj;
        for (const auto& [name, value] : p.params) pj[name] = to_literal(value);
        out["params"] = pj;
    }
    if (p.dim == 2 && p.m) out["m"] = *p.m;
    if (p.rhs_text) out["rhs"] = *p.rhs_text;
    if (!p.initial_texts.empty()) out["initial"] = p.initial_texts;
    if (p.moment_t) out["moment_t"] = p.moment_t->describe();
    if (p.moment_z) out["moment_z"] = p.moment_z->describe();
    if (p.s) out["s"] = to_string(*p.s);
    out["truncation"] = Json{{"t", p.trunc_t}, {"z", p.trunc_z}};
    return out;
}

// ---------------------------------------------------------------------------
// Polygon renderings.

inline std::string polygon_ascii(const NewtonPolygon& np) {
    long minx = np.generators.front().x, maxx = minx;
    long miny = np.lower_ordinate, maxy = miny;
    for (const auto& p : np.generators) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    std::ostringstream os;
    for (long y = maxy + 1; y >= miny - 1; --y) {
        os.width(4);
        os << y;
        os << " |";
        for (long x = minx - 1; x <= maxx + 1; ++x) {
            char c = '.';
            bool gen = false, vertex = false;
            for (const auto& p : np.generators)
                if (p.x == x && p.y == y) gen = true;
            for (const auto& p : np.chain)
                if (p.x == x && p.y == y) vertex = true;
            if (vertex)
                c = 'o';
            else if (gen)
                c = '*';
            else if (x == np.max_x() && y > np.chain.back().y)
                c = '|';
            else if (x <= np.chain.front().x && y == np.lower_ordinate)
                c = '-';
            os << ' ' << c;
        }
        os << '\n';
    }
    os << "      ";
    for (long x = minx - 1; x <= maxx + 1; ++x) {
        os.width(2);
        os << x;
    }
    os << '\n';
    os << "lower ordinate: " << np.lower_ordinate << '\n';
    os << "chain:";
    for (const auto& p : np.chain) os << " (" << p.x << "," << p.y << ")";
    os << '\n';
    os << "slopes:";
    if (np.slopes.empty())
        os << " (none)";
    else
        for (const auto& s : np.slopes) os << " " << to_string(s);
    os << '\n';
    auto fps = np.first_positive_slope();
    os << "first positive slope: " << (fps ? to_string(*fps) : "vertical") << '\n';
    return os.str();
}

inline std::string polygon_svg(const NewtonPolygon& np) {
    constexpr long scale = 48, pad = 56;
    long minx = np.generators.front().x, maxx = minx;
    long miny = np.lower_ordinate, maxy = miny;
    for (const auto& p : np.generators) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    minx -= 1; maxx += 1; miny -= 1; maxy += 1;
    long w = (maxx - minx) * scale + 2 * pad;
    long h = (maxy - miny) * scale + 2 * pad;
    auto X = [&](long x) { return pad + (x - minx) * scale; };
    auto Y = [&](long y) { return h - pad - (y - miny) * scale; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    os << "  <rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    // lattice
    for (long x = minx; x <= maxx; ++x)
        for (long y = miny; y <= maxy; ++y)
            os << "  <circle cx=\"" << X(x) << "\" cy=\"" << Y(y)
               << "\" r=\"1\" fill=\"#bbbbbb\"/>\n";
    // axis labels
    for (long x = minx; x <= maxx; ++x)
        os << "  <text x=\"" << X(x) << "\" y=\"" << h - pad / 3
           << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#555555\">" << x << "</text>\n";
    for (long y = miny; y <= maxy; ++y)
        os << "  <text x=\"" << pad / 3 << "\" y=\"" << Y(y) + 4
           << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#555555\">" << y << "</text>\n";
    // horizontal ray
    os << "  <line x1=\"" << X(minx) << "\" y1=\"" << Y(np.lower_ordinate) << "\" x2=\""
       << X(np.chain.front().x) << "\" y2=\"" << Y(np.lower_ordinate)
       << "\" stroke=\"#2060c0\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
    // chain
    if (np.chain.size() > 1) {
        os << "  <polyline fill=\"none\" stroke=\"#2060c0\" stroke-width=\"2\" points=\"";
        for (size_t i = 0; i < np.chain.size(); ++i) {
            if (i) os << " ";
            os << X(np.chain[i].x) << "," << Y(np.chain[i].y);
        }
        os << "\"/>\n";
    }
    // vertical ray
    os << "  <line x1=\"" << X(np.max_x()) << "\" y1=\"" << Y(np.chain.back().y) << "\" x2=\""
       << X(np.max_x()) << "\" y2=\"" << Y(maxy)
       << "\" stroke=\"#2060c0\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
    // slope labels
    for (size_t i = 0; i + 1 < np.chain.size(); ++i) {
        long mx = (X(np.chain[i].x) + X(np.chain[i + 1].x)) / 2;
        long my = (Y(np.chain[i].y) + Y(np.chain[i + 1].y)) / 2;
        os << "  <text x=\"" << mx + 8 << "\" y=\"" << my << "\" font-size=\"13\" fill=\"#c03030\">"
           << to_string(np.slopes[i]) << "</text>\n";
    }
    // generators
    for (const auto& p : np.generators)
        os << "  <circle cx=\"" << X(p.x) << "\" cy=\"" << Y(p.y)
           << "\" r=\"4\" fill=\"#202020\"/>\n";
    // chain vertices highlighted
    for (const auto& p : np.chain)
        os << "  <circle cx=\"" << X(p.x) << "\" cy=\"" << Y(p.y)
           << "\" r=\"5\" fill=\"none\" stroke=\"#2060c0\" stroke-width=\"2\"/>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace report

}  // namespace formaut
