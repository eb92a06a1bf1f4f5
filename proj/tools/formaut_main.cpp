// formaut — decide whether (moment) integro-differential operators act as
// linear automorphisms on formal power series spaces, and construct the
// formal solutions of the associated Cauchy problems by exact recursion.
//
//   formaut analyze <problem.json> [--space formal|gevrey|convergent] [--s R]
//   formaut solve   <problem.json> [--trunc-t N] [--trunc-z N]
//   formaut polygon <problem.json> [--format json|svg|ascii]
//
// Exit codes: analyze 0 = yes, 1 = no, 2 = conditional yes, 3 = input error;
// solve 0 = unique, 1 = underdetermined/obstructed, 3 = input error.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "formaut/analysis.hpp"
#include "formaut/gevrey.hpp"
#include "formaut/newton.hpp"
#include "formaut/parser.hpp"
#include "formaut/problem.hpp"
#include "formaut/report.hpp"
#include "formaut/solver.hpp"

namespace {

using namespace formaut;

struct Options {
    std::string file;
    std::string space;  // "", "formal", "gevrey", "convergent"
    std::string s_text;
    long n_bound = 256;
    long trunc_t = -1;
    long trunc_z = -1;
    std::string format = "json";
    bool no_timing = false;
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ProblemSpec load(const Options& opt) {
    ProblemSpec p = load_problem(opt.file);
    if (!opt.s_text.empty()) {
        p.s = parse_rational(opt.s_text);
        if (*p.s < 0) throw InputError("--s must be nonnegative");
    }
    if (opt.trunc_t >= 0) p.trunc_t = opt.trunc_t;
    if (opt.trunc_z >= 0) p.trunc_z = opt.trunc_z;
    if (p.dim == 2 && p.op2) {
        ReducedFamily fam = reduce_to_family(*p.op2);
        if (!p.m) p.m = fam.m;
        if (*p.m != fam.m)
            throw InputError("problem m = " + std::to_string(*p.m) +
                             " does not match the operator's principal t-order " +
                             std::to_string(fam.m));
    }
    return p;
}

std::string pick_space(const Options& opt, const ProblemSpec& p) {
    if (!opt.space.empty()) return opt.space;
    return p.s ? "gevrey" : "formal";
}

Rational required_s(const ProblemSpec& p, const std::string& space) {
    if (space == "convergent") return Rational(0);
    if (!p.s) throw InputError("the gevrey space needs s (problem file \"s\" or --s)");
    return *p.s;
}

NewtonPolygon problem_polygon(const ProblemSpec& p) {
    return p.dim == 1 ? polygon_1d(*p.op1) : polygon_2d(*p.op2);
}

Json family_json(const ReducedFamily& fam) {
    Json out;
    out["m"] = fam.m;
    out["n_stable"] = fam.n_stable;
    Json ex = Json::array();
    for (long n = 0; n < fam.n_stable; ++n) {
        Operator1 member = fam.specialize(n);
        Json e;
        e["n"] = n;
        e["operator"] = member.empty() ? "0" : pretty_print(member);
        if (!member.empty()) e["lower_ordinate"] = polygon_1d(member).lower_ordinate;
        ex.push_back(e);
    }
    out["exceptional"] = ex;
    return out;
}

// Builds the document and returns {doc, exit_code}; separated so the timing
// block can wrap any command uniformly.
std::pair<Json, int> build_document(const std::string& cmd, const Options& opt) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = cmd;
    ProblemSpec p = load(opt);
    doc["problem"] = report::problem_echo(p);

    if (cmd == "polygon") {
        doc["polygon"] = report::polygon_json(problem_polygon(p));
        return {doc, 0};
    }

    doc["polygon"] = report::polygon_json(problem_polygon(p));

    if (cmd == "analyze") {
        std::string space = pick_space(opt, p);
        if (space != "formal" && space != "gevrey" && space != "convergent")
            throw InputError("unknown space '" + space + "'");
        AutomorphismReport rep;
        if (p.dim == 1) {
            const Operator1& P = *p.op1;
            doc["characteristic_polynomial"] =
                report::char_poly_json(char_poly_1d(P), polygon_1d(P).lower_ordinate);
            bool moment = p.moment_z && p.moment_z->kind() != MomentSequence::Kind::Factorial;
            if (moment) {
                if (space != "formal")
                    throw InputError("Gevrey/convergent analysis is classical; moment operators "
                                     "are checked on the formal space only");
                rep = check_formal_1d_moment(P, *p.moment_z, opt.n_bound);
            } else if (space == "formal") {
                rep = check_formal_1d(P);
            } else {
                rep = check_gevrey_1d(P, required_s(p, space));
            }
        } else {
            const Operator2& P = *p.op2;
            MomentSequence mt = moment_or_factorial(p.moment_t);
            MomentSequence mz = moment_or_factorial(p.moment_z);
            ReducedFamily fam = reduce_to_family(P);
            doc["reduced_family"] = family_json(fam);
            bool classical = mt.kind() == MomentSequence::Kind::Factorial &&
                             mz.kind() == MomentSequence::Kind::Factorial;
            if (classical) {
                try {
                    doc["characteristic_polynomial_2d"] =
                        report::char_poly_2d_json(char_poly_2d(P, fam.m, 0));
                } catch (const EmptyPrincipalPart&) {
                    doc["characteristic_polynomial_2d"] = report::char_poly_2d_json(CharPoly2());
                }
            }
            if (space == "formal")
                rep = check_formal_2d(P, opt.n_bound, mt, mz);
            else
                rep = check_gevrey_2d(P, required_s(p, space), opt.n_bound, mt, mz);
        }
        doc["reports"] = Json::array({report::automorphism_json(rep)});
        int code = rep.verdict == Verdict::Yes ? 0 : rep.verdict == Verdict::No ? 1 : 2;
        return {doc, code};
    }

    if (cmd == "solve") {
        if (!p.rhs_text) throw InputError("solve needs an \"rhs\" field");
        int code = 0;
        if (p.dim == 1) {
            const Operator1& P = *p.op1;
            MomentSequence mz = moment_or_factorial(p.moment_z);
            if (!mz.exact_ratios())
                throw InputError("solving needs exact moment ratios (factorial, q_factorial or "
                                 "table), not gamma_over");
            doc["characteristic_polynomial"] =
                report::char_poly_json(char_poly_1d(P), polygon_1d(P).lower_ordinate);
            Poly1 rhs = parse_poly1(*p.rhs_text, p.params);
            long m = polygon_1d(P).lower_ordinate;
            long N = p.trunc_z;
            Series1 f = to_series(rhs, N + std::max<long>(m, 0));
            SolveOutcome1 o = solve_1d(P, f, N, mz);
            doc["solution"] = report::solution1_json(o);
            code = o.status == SolveStatus::Unique ? 0 : 1;

            if (p.s && o.status != SolveStatus::Obstructed) {
                Json gv;
                bool have = false;
                try {
                    long lo = std::max<long>(1, N / 2);
                    GevreyEstimate est = estimate_order(o.particular, lo, N);
                    BoundOutcome b = verify_bound(o.particular, *p.s, std::min<long>(N, 100));
                    if (auto* cert = std::get_if<BoundCertificate>(&b)) est.certificate = *cert;
                    gv = report::gevrey_json(est);
                    if (auto* idx = std::get_if<long>(&b)) gv["bound_counterexample_index"] = *idx;
                    have = true;
                } catch (const DegenerateWindow&) {
                    have = false;
                }
                if (have) doc["gevrey"] = gv;
            }
        } else {
            const Operator2& P = *p.op2;
            MomentSequence mt = moment_or_factorial(p.moment_t);
            MomentSequence mz = moment_or_factorial(p.moment_z);
            if (!mt.exact_ratios() || !mz.exact_ratios())
                throw InputError("solving needs exact moment ratios (factorial, q_factorial or "
                                 "table), not gamma_over");
            Poly2 rhs = parse_poly2(*p.rhs_text, p.params);
            std::vector<Poly1> phi;
            for (const auto& text : p.initial_texts) phi.push_back(parse_poly1(text, p.params));
            SolveOutcome2 o = solve_cauchy_2d(P, *p.m, rhs, phi, p.trunc_t, p.trunc_z, mt, mz);
            doc["solution"] = report::solution2_json(o);
            code = o.status == SolveStatus::Unique ? 0 : 1;
        }
        return {doc, code};
    }

    throw InputError("unknown command '" + cmd + "'");
}

int dispatch(const std::string& cmd, const Options& opt) {
    if (opt.format != "json") {
        if (cmd != "polygon")
            throw InputError("--format svg|ascii applies to `polygon` only");
        NewtonPolygon np = problem_polygon(load(opt));
        if (opt.format == "ascii")
            std::cout << report::polygon_ascii(np);
        else if (opt.format == "svg")
            std::cout << report::polygon_svg(np);
        else
            throw InputError("unknown format '" + opt.format + "'");
        return 0;
    }
    auto t0 = std::chrono::steady_clock::now();
    auto [doc, code] = build_document(cmd, opt);
    if (!opt.no_timing) {
        auto t1 = std::chrono::steady_clock::now();
        doc["timing"] = Json{
            {"total_ms",
             std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}};
    }
    std::cout << doc.dump(2) << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"automorphism analysis and formal solving for integro-differential operators "
                 "on power series spaces"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", opt.file, "problem file (JSON)")->required();
        sub->add_option("--n-bound", opt.n_bound, "bound for semi-decision scans (default 256)");
        sub->add_option("--trunc-t", opt.trunc_t, "override t-truncation");
        sub->add_option("--trunc-z", opt.trunc_z, "override z-truncation");
        sub->add_option("--format", opt.format, "output format: json|svg|ascii (default json)");
        sub->add_flag("--no-timing", opt.no_timing, "omit the timing block (deterministic output)");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "decide the automorphism property");
    add_common(analyze);
    analyze->add_option("--space", opt.space, "formal|gevrey|convergent");
    analyze->add_option("--s", opt.s_text, "Gevrey order (exact rational)");

    CLI::App* solve = app.add_subcommand("solve", "construct the formal solution");
    add_common(solve);
    solve->add_option("--s", opt.s_text, "Gevrey order for the diagnostics block");

    CLI::App* polygon = app.add_subcommand("polygon", "render the Newton polygon");
    add_common(polygon);

    CLI11_PARSE(app, argc, argv);

    std::string cmd = analyze->parsed() ? "analyze" : solve->parsed() ? "solve" : "polygon";
    try {
        return dispatch(cmd, opt);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ProblemError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
