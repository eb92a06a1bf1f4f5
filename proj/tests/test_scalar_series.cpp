#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "formaut/scalar.hpp"
#include "formaut/series.hpp"
#include "test_support.hpp"

using namespace formaut;

TEST_CASE("scalar field arithmetic is exact") {
    Scalar a(make_rational(1, 3), make_rational(1, 2));
    Scalar b(make_rational(2, 3), make_rational(-1, 2));
    REQUIRE(a + b == Scalar(1));
    REQUIRE((a - a).is_zero());

    Scalar i = Scalar::i();
    REQUIRE(i * i == Scalar(-1));
    REQUIRE(Scalar(1) / i == -i);

    // division round-trips through multiplication
    Scalar q = a / b;
    REQUIRE(q * b == a);
    REQUIRE_THROWS_AS(a / Scalar(0), std::domain_error);
}

TEST_CASE("rational helpers") {
    REQUIRE(make_rational(2, 4) == make_rational(1, 2));
    REQUIRE(to_string(make_rational(-6, 4)) == "-3/2");
    REQUIRE(rational_pow(make_rational(1, 2), -2) == Rational(4));
    REQUIRE(rational_pow(Rational(3), 0) == 1);
    REQUIRE_THROWS(parse_rational("1/0"));
}

TEST_CASE("scalar literal round-trip") {
    std::vector<std::string> samples = {"0",   "3/7",      "-2",  "1/2+1/3i",
                                        "2-i", "i",        "-3i", "-1/2-2/5i",
                                        "5",   "7/2+i"};
    for (const auto& s : samples) {
        Scalar v = parse_scalar_literal(s);
        REQUIRE(to_literal(v) == s);
    }
    REQUIRE_THROWS(parse_scalar_literal("1+"));
    REQUIRE_THROWS(parse_scalar_literal("1+2"));
    REQUIRE_THROWS(parse_scalar_literal(""));
}

TEST_CASE("series add follows the min-truncation rule") {
    Series1 a(3), b(3);
    a[0] = Scalar(1);
    a[1] = Scalar(1);
    b[1] = Scalar(1);
    Series1 r = add(a, b);
    REQUIRE(r.truncation() == 3);
    REQUIRE(r[0] == Scalar(1));
    REQUIRE(r[1] == Scalar(2));

    // s + 0 = s
    Series1 z(3);
    REQUIRE(add(a, z) == a);

    Series1 long5(5), short2(2);
    REQUIRE(add(long5, short2).truncation() == 2);
}

TEST_CASE("series multiplication is the truncated Cauchy product") {
    Series1 onepz(2), onemz(2);
    onepz[0] = Scalar(1);
    onepz[1] = Scalar(1);
    onemz[0] = Scalar(1);
    onemz[1] = Scalar(-1);
    Series1 r = mul(onepz, onemz);
    REQUIRE(r[0] == Scalar(1));
    REQUIRE(r[1] == Scalar(0));
    REQUIRE(r[2] == Scalar(-1));

    // z * z at truncation 1: the degree-2 term is beyond the truncation
    Series1 zz(1);
    zz[1] = Scalar(1);
    Series1 sq = mul(zz, zz);
    REQUIRE(sq.truncation() == 1);
    REQUIRE(sq.is_zero());

    // (1+z+z^2)^2 truncated at 2, against a direct convolution
    Series1 p(2);
    p[0] = Scalar(1);
    p[1] = Scalar(1);
    p[2] = Scalar(1);
    Series1 got = mul(p, p);
    for (long n = 0; n <= 2; ++n) {
        Scalar conv;
        for (long k = 0; k <= n; ++k) conv += p[k] * p[n - k];
        REQUIRE(got[n] == conv);
    }
    REQUIRE(got[2] == Scalar(3));
}

TEST_CASE("derivative drops the truncation by its order") {
    Series1 z3(4);
    z3[3] = Scalar(1);
    Series1 d = derive(z3, 2);
    REQUIRE(d.truncation() == 2);
    REQUIRE(d[1] == Scalar(6));

    std::mt19937 rng(7);
    Series1 s = testsupport::random_series(rng, 5);
    REQUIRE(derive(s, 0) == s);

    // exp-like series: derivative shifts termwise with the n * c_n rule
    Series1 e(6);
    Rational fact(1);
    for (long n = 0; n <= 6; ++n) {
        if (n > 0) fact *= n;
        e[n] = Scalar(Rational(1) / fact);
    }
    Series1 de = derive(e, 1);
    REQUIRE(de.truncation() == 5);
    for (long n = 0; n <= 5; ++n) REQUIRE(de[n] == e[n]);
}

TEST_CASE("polynomial order of vanishing") {
    Poly1 p;
    poly_add_term(p, 3, Scalar(1));
    poly_add_term(p, 5, Scalar(1));
    REQUIRE(ord_z(p) == 3);

    Poly1 q;
    poly_add_term(q, 0, Scalar(2));  // a != 0
    poly_add_term(q, 1, Scalar(7));
    REQUIRE(ord_z(q) == 0);

    REQUIRE(!ord_z(Poly1{}).has_value());
}

TEST_CASE("ring axioms hold exactly on random truncated series") {
    std::mt19937 rng(12345);
    for (int iter = 0; iter < 25; ++iter) {
        Series1 a = testsupport::random_series(rng, 6);
        Series1 b = testsupport::random_series(rng, 6);
        Series1 c = testsupport::random_series(rng, 6);
        REQUIRE(add(add(a, b), c) == add(a, add(b, c)));
        REQUIRE(mul(a, b) == mul(b, a));
        REQUIRE(mul(mul(a, b), c) == mul(a, mul(b, c)));
        REQUIRE(mul(a, add(b, c)) == add(mul(a, b), mul(a, c)));
    }
}

TEST_CASE("Leibniz rule at reduced truncation") {
    std::mt19937 rng(777);
    for (int iter = 0; iter < 20; ++iter) {
        Series1 a = testsupport::random_series(rng, 7);
        Series1 b = testsupport::random_series(rng, 7);
        Series1 lhs = derive(mul(a, b), 1);
        Series1 rhs = add(mul(derive(a, 1), b), mul(a, derive(b, 1)));
        long t = std::min(lhs.truncation(), rhs.truncation());
        for (long n = 0; n <= t; ++n) REQUIRE(lhs[n] == rhs[n]);
    }
}

TEST_CASE("recomputation is bit-identical") {
    std::mt19937 rng(99);
    Series1 a = testsupport::random_series(rng, 10);
    Series1 b = testsupport::random_series(rng, 10);
    REQUIRE(mul(a, b) == mul(a, b));
    REQUIRE(derive(mul(a, b), 2) == derive(mul(a, b), 2));
}

TEST_CASE("series2 invariants") {
    Series2 u(2, 3);
    REQUIRE(u.truncation_t() == 2);
    REQUIRE(u.truncation_z() == 3);
    REQUIRE(u.is_zero());
    std::vector<Series1> ragged{Series1(2), Series1(3)};
    REQUIRE_THROWS_AS(Series2(std::move(ragged)), std::invalid_argument);
}
