#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "formaut/analysis.hpp"
#include "formaut/parser.hpp"
#include "formaut/solver.hpp"
#include "test_support.hpp"

using namespace formaut;

namespace {
const std::map<std::string, Scalar> kAB = {{"a", Scalar(1)}, {"b", Scalar(1)}};
Operator1 fuchsian_irregular_op() { return parse_operator1("a + b*z*Dz + z^3*Dz^2", kAB); }
Operator1 resonant_zero_op() { return parse_operator1("b*z*Dz + z^3*Dz^2", {{"b", Scalar(1)}}); }
Operator1 shifted_image_op() { return parse_operator1("a*z + b*z^2*Dz + z^5*Dz^2", kAB); }
Operator1 euler_op() { return parse_operator1("a + b*z*Dz", kAB); }
}  // namespace

TEST_CASE("constant right-hand side for the worked operator") {
    Series1 f(30);
    f[0] = Scalar(1);
    SolveOutcome1 o = solve_1d(fuchsian_irregular_op(), f, 30);
    REQUIRE(o.status == SolveStatus::Unique);
    REQUIRE(o.particular[0] == Scalar(1));
    for (long n = 1; n <= 30; ++n) REQUIRE(o.particular[n].is_zero());
}

TEST_CASE("z^2 right-hand side reproduces the recursion values") {
    Series1 f(33);
    f[2] = Scalar(1);
    SolveOutcome1 o = solve_1d(fuchsian_irregular_op(), f, 30);
    REQUIRE(o.status == SolveStatus::Unique);
    REQUIRE(o.particular[2] == Scalar(make_rational(1, 3)));
    REQUIRE(o.particular[3] == Scalar(make_rational(-1, 6)));

    // the printed recursion: u_n = (f_n - (n-1)(n-2) u_{n-1}) / (a + b n)
    std::vector<Scalar> u(31);
    for (long n = 0; n <= 30; ++n) {
        Scalar fn = n == 2 ? Scalar(1) : Scalar(0);
        Scalar prev = n > 0 ? u[static_cast<size_t>(n - 1)] : Scalar(0);
        u[static_cast<size_t>(n)] =
            (fn - Scalar((n - 1) * (n - 2)) * prev) / Scalar(1 + n);
        REQUIRE(o.particular[n] == u[static_cast<size_t>(n)]);
    }
}

TEST_CASE("first-order operator divides coefficientwise") {
    std::mt19937 rng(21);
    Series1 f = testsupport::random_series(rng, 25);
    SolveOutcome1 o = solve_1d(euler_op(), f, 25);
    REQUIRE(o.status == SolveStatus::Unique);
    for (long n = 0; n <= 25; ++n) REQUIRE(o.particular[n] == f[n] / Scalar(1 + n));
}

TEST_CASE("kernel bases") {
    std::vector<Series1> k1 = kernel_basis(parse_operator1("Dz"), 10);
    REQUIRE(k1.size() == 1);
    REQUIRE(k1[0][0] == Scalar(1));
    REQUIRE(derive(k1[0], 1).is_zero());

    std::vector<Series1> k2 = kernel_basis(parse_operator1("Dz^2"), 10);
    REQUIRE(k2.size() == 2);
    REQUIRE(k2[0][0] == Scalar(1));
    REQUIRE(k2[1][1] == Scalar(1));

    // resonant-at-zero operator: the constants survive
    std::vector<Series1> ke2 = kernel_basis(resonant_zero_op(), 12);
    REQUIRE(ke2.size() == 1);
    REQUIRE(ke2[0][0] == Scalar(1));
    REQUIRE(apply1(resonant_zero_op(), ke2[0]).is_zero());

    REQUIRE_THROWS_AS(kernel_basis(shifted_image_op(), 10), PositiveM);
}

TEST_CASE("resonant operator splits into free and determined indices") {
    // resonant operator with f = z: every coefficient except the constant is pinned
    Series1 f(12);
    f[1] = Scalar(1);
    SolveOutcome1 o = solve_1d(resonant_zero_op(), f, 12);
    REQUIRE(o.status == SolveStatus::Underdetermined);
    REQUIRE(o.free_indices == std::vector<long>{0});
    REQUIRE(o.kernel_basis.size() == 1);
    REQUIRE(o.particular[1] == Scalar(1));  // b n u_n = f_n at n = 1

    // incompatible resonance: f with nonzero constant cannot be hit
    Series1 bad(12);
    bad[0] = Scalar(1);
    SolveOutcome1 ob = solve_1d(resonant_zero_op(), bad, 12);
    REQUIRE(ob.status == SolveStatus::Obstructed);
    REQUIRE(ob.failed_index == 0);
    REQUIRE(ob.reason == Obstruction::ResonanceHit);
}

TEST_CASE("image constraints for positive lower ordinate") {
    Series1 one(31);
    one[0] = Scalar(1);
    SolveOutcome1 o = solve_1d(shifted_image_op(), one, 30);
    REQUIRE(o.status == SolveStatus::Obstructed);
    REQUIRE(o.failed_index == 0);
    REQUIRE(o.reason == Obstruction::ImageConstraint);

    // f in z C[[z]] is solvable uniquely and matches the oracle
    std::mt19937 rng(22);
    Series1 f(26);
    for (long n = 1; n <= 26; ++n) f[n] = testsupport::random_scalar(rng);
    SolveOutcome1 ok = solve_1d(shifted_image_op(), f, 25);
    REQUIRE(ok.status == SolveStatus::Unique);
    OracleOutcome oc = oracle_solve_1d(shifted_image_op(), f, 25);
    REQUIRE(oc.status == OracleOutcome::Status::Unique);
    for (long n = 0; n <= 25; ++n) REQUIRE(ok.particular[n] == oc.particular[static_cast<size_t>(n)]);
}

TEST_CASE("oracle on the worked examples") {
    Series1 f(33);
    f[2] = Scalar(1);
    OracleOutcome o = oracle_solve_1d(fuchsian_irregular_op(), f, 30);
    REQUIRE(o.status == OracleOutcome::Status::Unique);
    REQUIRE(o.particular[2] == Scalar(make_rational(1, 3)));
    REQUIRE(o.particular[3] == Scalar(make_rational(-1, 6)));

    Series1 one(31);
    one[0] = Scalar(1);
    OracleOutcome bad = oracle_solve_1d(shifted_image_op(), one, 30);
    REQUIRE(bad.status == OracleOutcome::Status::Inconsistent);

    Operator1 id = parse_operator1("1");
    std::mt19937 rng(23);
    Series1 g = testsupport::random_series(rng, 12);
    OracleOutcome oid = oracle_solve_1d(id, g, 12);
    REQUIRE(oid.status == OracleOutcome::Status::Unique);
    for (long n = 0; n <= 12; ++n) REQUIRE(oid.particular[static_cast<size_t>(n)] == g[n]);
}

TEST_CASE("recursion and oracle agree on automorphism operators") {
    std::mt19937 rng(24);
    int done = 0;
    while (done < 10) {
        Operator1 P = testsupport::random_operator1(rng, 0);
        if (check_formal_1d(P).verdict != Verdict::Yes) continue;
        ++done;
        Series1 f = testsupport::random_series(rng, 30);
        SolveOutcome1 rec = solve_1d(P, f, 30);
        OracleOutcome orc = oracle_solve_1d(P, f, 30);
        REQUIRE(rec.status == SolveStatus::Unique);
        REQUIRE(orc.status == OracleOutcome::Status::Unique);
        for (long n = 0; n <= 30; ++n)
            REQUIRE(rec.particular[n] == orc.particular[static_cast<size_t>(n)]);
        // residual re-checked externally over the conservative window
        Series1 pu = apply1(P, rec.particular);
        long upto = std::min(rec.residual_order, pu.truncation());
        for (long n = 0; n <= upto; ++n) REQUIRE(pu[n] == f[n]);
    }
}

TEST_CASE("solving inverts application on automorphism operators") {
    std::mt19937 rng(29);
    int done = 0;
    while (done < 10) {
        Operator1 P = testsupport::random_operator1(rng, 0);
        if (check_formal_1d(P).verdict != Verdict::Yes) continue;
        ++done;
        Series1 u = testsupport::random_series(rng, 24);
        Series1 f = apply1(P, u);
        SolveOutcome1 back = solve_1d(P, f, f.truncation());
        REQUIRE(back.status == SolveStatus::Unique);
        for (long n = 0; n <= f.truncation(); ++n) REQUIRE(back.particular[n] == u[n]);
    }
}

TEST_CASE("oracle image of a positive-ordinate operator is z^m C[[z]]") {
    std::mt19937 rng(25);
    int done = 0;
    while (done < 8) {
        long m = std::uniform_int_distribution<long>(1, 2)(rng);
        Operator1 P = testsupport::random_operator1(rng, m);
        ResonanceVerdict v = nonneg_integer_roots(char_poly_1d(P), 0);
        if (!v.holds()) continue;
        ++done;
        // f with a nonzero coefficient below order m: inconsistent
        Series1 f = testsupport::random_series(rng, 20);
        f[std::uniform_int_distribution<long>(0, m - 1)(rng)] = Scalar(1);
        REQUIRE(oracle_solve_1d(P, f, 18).status == OracleOutcome::Status::Inconsistent);
        // f divisible by z^m: solvable
        Series1 g(20);
        for (long n = m; n <= 20; ++n) g[n] = testsupport::random_scalar(rng);
        REQUIRE(oracle_solve_1d(P, g, 18).status == OracleOutcome::Status::Unique);
    }
}

TEST_CASE("kernel dimension of the finite section stabilizes at -m") {
    std::mt19937 rng(26);
    int done = 0;
    while (done < 8) {
        long m = std::uniform_int_distribution<long>(-2, -1)(rng);
        Operator1 P = testsupport::random_operator1(rng, m);
        ResonanceVerdict v = nonneg_integer_roots(char_poly_1d(P), -m);
        if (!v.holds()) continue;
        ++done;
        Series1 zero(40 + m);
        OracleOutcome o = oracle_solve_1d(P, zero, 40);
        REQUIRE(o.ker_dim() == -m);
        REQUIRE(o.coker_dim() == 0);
        REQUIRE(static_cast<long>(kernel_basis(P, 40).size()) == -m);
    }
}

TEST_CASE("two-variable Cauchy problems") {
    // Dt u = 0 with u(0, z) = phi: the solution is constant in t
    Operator2 dt = parse_operator2("Dt");
    Poly1 phi = parse_poly1("1 + 2*z + z^3");
    SolveOutcome2 o = solve_cauchy_2d(dt, 1, Poly2{}, {phi}, 5, 6);
    REQUIRE(o.status == SolveStatus::Unique);
    for (long k = 0; k <= 6; ++k) REQUIRE(o.particular[0][k] == poly_coeff(phi, k));
    for (long n = 1; n <= 5; ++n) REQUIRE(o.particular[n].is_zero());

    // worked operator, f = 1, zero initial data: u = t
    Operator2 e9 = parse_operator2("Dt + t*Dt^2 + z*t*Dt^2*Dz");
    SolveOutcome2 o9 = solve_cauchy_2d(e9, 1, Poly2{{{0, 0}, Scalar(1)}}, {Poly1{}}, 6, 6);
    REQUIRE(o9.status == SolveStatus::Unique);
    REQUIRE(o9.particular[1][0] == Scalar(1));
    for (long n = 0; n <= 6; ++n)
        for (long k = 0; k <= 6; ++k)
            if (!(n == 1 && k == 0)) REQUIRE(o9.particular[n][k].is_zero());

    // transport: (Dt - Dz) u = 0, u(0, z) = z gives u = z + t
    Operator2 tr = parse_operator2("Dt - Dz");
    SolveOutcome2 ot = solve_cauchy_2d(tr, 1, Poly2{}, {parse_poly1("z")}, 5, 5);
    REQUIRE(ot.status == SolveStatus::Unique);
    REQUIRE(ot.particular[0][1] == Scalar(1));
    REQUIRE(ot.particular[1][0] == Scalar(1));
    for (long n = 0; n <= 5; ++n)
        for (long k = 0; k <= 5; ++k)
            if (!((n == 0 && k == 1) || (n == 1 && k == 0)))
                REQUIRE(ot.particular[n][k].is_zero());

    REQUIRE_THROWS_AS(solve_cauchy_2d(dt, 2, Poly2{}, {phi, phi}, 4, 4), std::invalid_argument);
}

TEST_CASE("cauchy solver matches the 2D oracle on the worked operator") {
    Operator2 e9 = parse_operator2("Dt + t*Dt^2 + z*t*Dt^2*Dz");
    std::mt19937 rng(28);
    Poly2 f;
    for (int i = 0; i < 5; ++i)
        poly2_add_term(f, std::uniform_int_distribution<long>(0, 3)(rng),
                       std::uniform_int_distribution<long>(0, 3)(rng),
                       testsupport::random_scalar(rng));
    long Nt = 5, Nz = 5;
    SolveOutcome2 o = solve_cauchy_2d(e9, 1, f, {Poly1{}}, Nt, Nz);
    REQUIRE(o.status == SolveStatus::Unique);
    long vz = Nz + 2 * (Nt + 1) + 2;
    Series2 fs = to_series2(f, Nt, vz);
    OracleOutcome orc = oracle_solve_2d(e9, 1, fs, Nt, vz);
    REQUIRE(orc.status == OracleOutcome::Status::Unique);
    for (long n = 0; n + 1 <= Nt; ++n)
        for (long k = 0; k <= Nz; ++k) {
            Scalar v_nk = orc.particular[static_cast<size_t>(n * (vz + 1) + k)];
            REQUIRE(o.particular[n + 1][k] == v_nk / Scalar(n + 1));
        }
}

TEST_CASE("cauchy solver matches the 2D oracle through v = Dt^m u") {
    std::mt19937 rng(27);
    int done = 0;
    while (done < 5) {
        Operator2 P = testsupport::random_operator2(rng, 1, 2, 1);
        AutomorphismReport rep = check_formal_2d(P, 32);
        if (rep.verdict != Verdict::Yes) continue;
        ++done;
        // random polynomial right-hand side, zero initial data
        Poly2 f;
        for (int i = 0; i < 4; ++i)
            poly2_add_term(f, std::uniform_int_distribution<long>(0, 2)(rng),
                           std::uniform_int_distribution<long>(0, 2)(rng),
                           testsupport::random_scalar(rng));
        long Nt = 4, Nz = 4;
        SolveOutcome2 o = solve_cauchy_2d(P, 1, f, {Poly1{}}, Nt, Nz);
        REQUIRE(o.status == SolveStatus::Unique);

        // oracle solves for v on a window large enough to cover u
        long vt = Nt, vz = Nz + 2 * P.max_order_z() * (Nt + 1) + 2;
        Series2 fs = to_series2(f, vt, vz);
        OracleOutcome orc = oracle_solve_2d(P, 1, fs, vt, vz);
        if (orc.status != OracleOutcome::Status::Unique) continue;  // section too small
        // v_{n} = (n+1) u_{n+1} for m = 1 (factorial moments)
        for (long n = 0; n + 1 <= Nt; ++n)
            for (long k = 0; k <= Nz; ++k) {
                Scalar v_nk = orc.particular[static_cast<size_t>(n * (vz + 1) + k)];
                REQUIRE(o.particular[n + 1][k] == v_nk / Scalar(n + 1));
            }
    }
}

TEST_CASE("truncation preconditions are enforced") {
    Series1 shortf(3);
    REQUIRE_THROWS_AS(solve_1d(fuchsian_irregular_op(), shortf, 10), TruncationTooShort);
}

TEST_CASE("two-variable underdetermined problem produces kernel directions") {
    // t Dt has principal t-order 0 and its family member at n = 0 is empty:
    // solutions of t Dt u = t z differ by an arbitrary series in z.
    Operator2 P = parse_operator2("t*Dt");
    SolveOutcome2 o = solve_cauchy_2d(P, 0, Poly2{{{1, 1}, Scalar(1)}}, {}, 4, 3);
    REQUIRE(o.status == SolveStatus::Underdetermined);
    REQUIRE(o.particular[1][1] == Scalar(1));
    REQUIRE(o.free_indices.size() == 4);  // (0, k) for k = 0..3
    REQUIRE(o.kernel_basis.size() == 4);
    for (const auto& k : o.kernel_basis) {
        Series2 pk = apply2(P, k);
        REQUIRE(pk.is_zero());
    }

    // an incompatible right-hand side at the empty level obstructs
    SolveOutcome2 bad = solve_cauchy_2d(P, 0, Poly2{{{0, 0}, Scalar(1)}}, {}, 4, 3);
    REQUIRE(bad.status == SolveStatus::Obstructed);
    REQUIRE(bad.failed_level == 0);
}

TEST_CASE("two-variable problem with m = 0") {
    // (1 + z t Dz) u = z: no initial data, u_n = (-1)^n z
    Operator2 P = parse_operator2("1 + z*t*Dz");
    SolveOutcome2 o = solve_cauchy_2d(P, 0, Poly2{{{0, 1}, Scalar(1)}}, {}, 5, 5);
    REQUIRE(o.status == SolveStatus::Unique);
    for (long n = 0; n <= 5; ++n) {
        REQUIRE(o.particular[n][1] == Scalar(n % 2 == 0 ? 1 : -1));
        for (long k = 0; k <= 5; ++k)
            if (k != 1) REQUIRE(o.particular[n][k].is_zero());
    }
    REQUIRE(check_formal_2d(P, 32).verdict == Verdict::Yes);
}

TEST_CASE("moment solving in one variable") {
    // (1 + z Dmz) u = f at q = 2: u_n = f_n / (1 + [n]_2)
    MomentSequence q2 = MomentSequence::q_factorial(Rational(2));
    Operator1 P = parse_operator1("1 + z*Dmz");
    std::mt19937 rng(31);
    Series1 f = testsupport::random_series(rng, 16);
    SolveOutcome1 o = solve_1d(P, f, 16, q2);
    REQUIRE(o.status == SolveStatus::Unique);
    for (long n = 0; n <= 16; ++n) {
        Rational qn = n == 0 ? Rational(0) : (rational_pow(Rational(2), n) - 1);
        REQUIRE(o.particular[n] == f[n] / Scalar(Rational(1) + qn));
    }
    // the recursion agrees with the moment-aware oracle
    OracleOutcome orc = oracle_solve_1d(P, f, 16, q2);
    REQUIRE(orc.status == OracleOutcome::Status::Unique);
    for (long n = 0; n <= 16; ++n)
        REQUIRE(o.particular[n] == orc.particular[static_cast<size_t>(n)]);
}

TEST_CASE("moment solving in two variables") {
    MomentSequence q2 = MomentSequence::q_factorial(Rational(2));
    MomentSequence fact = MomentSequence::factorial();

    // Dmt u = 0 with u(0,z) = phi keeps the initial data
    Operator2 dt = parse_operator2("Dmt");
    Poly1 phi = parse_poly1("1 + 3*z^2");
    SolveOutcome2 o = solve_cauchy_2d(dt, 1, Poly2{}, {phi}, 4, 5, q2, fact);
    REQUIRE(o.status == SolveStatus::Unique);
    for (long k = 0; k <= 5; ++k) REQUIRE(o.particular[0][k] == poly_coeff(phi, k));
    for (long n = 1; n <= 4; ++n) REQUIRE(o.particular[n].is_zero());

    // (Dmt + t Dmt^2) u = 1 with zero initial data: v = 1, u = t / [1]_q! = t
    Operator2 P = parse_operator2("Dmt + t*Dmt^2");
    SolveOutcome2 o2 = solve_cauchy_2d(P, 1, Poly2{{{0, 0}, Scalar(1)}}, {Poly1{}}, 5, 5, q2, fact);
    REQUIRE(o2.status == SolveStatus::Unique);
    REQUIRE(o2.particular[1][0] == Scalar(1));
    for (long n = 0; n <= 5; ++n)
        for (long k = 0; k <= 5; ++k)
            if (!(n == 1 && k == 0)) REQUIRE(o2.particular[n][k].is_zero());
}

TEST_CASE("operators defined by coefficient callbacks") {
    // a_0(z) = sum z^k (all ones), a_1(z) = z: the window materializes the
    // series coefficients the computation will read
    Operator1 P = operator_from_coefficients(
        {0, 1},
        [](long j, long k) {
            if (j == 0) return Scalar(1);
            return k == 1 ? Scalar(1) : Scalar(0);
        },
        24);
    REQUIRE(polygon_1d(P).lower_ordinate == 0);
    REQUIRE(char_poly_1d(P).coeffs() == std::vector<Scalar>{Scalar(1), Scalar(1)});
    std::mt19937 rng(32);
    Series1 f = testsupport::random_series(rng, 12);
    SolveOutcome1 o = solve_1d(P, f, 12);
    OracleOutcome orc = oracle_solve_1d(P, f, 12);
    REQUIRE(o.status == SolveStatus::Unique);
    for (long n = 0; n <= 12; ++n)
        REQUIRE(o.particular[n] == orc.particular[static_cast<size_t>(n)]);

    Operator2 Q = operator_from_coefficients(
        {{1, 0}},
        [](long, long, long nu, long k) { return nu == 0 && k == 0 ? Scalar(1) : Scalar(0); }, 3,
        3);
    REQUIRE(Q == parse_operator2("Dt"));
}
