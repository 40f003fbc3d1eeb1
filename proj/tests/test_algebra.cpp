#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qsum/quadratic.hpp"

using namespace qsum;

namespace {

const FieldSpec Q = FieldSpec::rationals();
const FieldSpec F2 = FieldSpec::prime(2);
const FieldSpec F3 = FieldSpec::prime(3);
const FieldSpec F5 = FieldSpec::prime(5);

Scalar qs(long long n, long long d = 1) { return Scalar::fraction(Q, n, d); }

} // namespace

TEST_CASE("scalar arithmetic canonical forms") {
    CHECK(qs(2, 4) == qs(1, 2));
    CHECK(qs(-2, -4) == qs(1, 2));
    CHECK(qs(2, -4) == qs(-1, 2));
    CHECK((qs(1, 2) + qs(1, 3)) == qs(5, 6));
    CHECK((qs(1, 2) * qs(2, 3)) == qs(1, 3));
    CHECK(qs(3, 7).inverse() == qs(7, 3));
    CHECK(qs(0).is_zero());
    CHECK_THROWS_AS(qs(1) / qs(0), Error);

    Scalar a = Scalar::of_int(F5, 7);
    CHECK(a == Scalar::of_int(F5, 2));
    CHECK((a * Scalar::of_int(F5, 3)) == Scalar::of_int(F5, 1));
    CHECK(Scalar::of_int(F5, 3).inverse() == Scalar::of_int(F5, 2));
    CHECK_THROWS_AS(Scalar::of_int(Q, 1) + Scalar::of_int(F5, 1), FieldMismatch);
}

TEST_CASE("scalar parsing round-trips") {
    for (const char* text : {"0", "1", "-7", "3/4", "-22/7"}) {
        Scalar s = parse_scalar(Q, text);
        CHECK(parse_scalar(Q, s.str()) == s);
    }
    CHECK(parse_scalar(F5, "7") == Scalar::of_int(F5, 2));
    CHECK(parse_scalar(F5, "1/2") == Scalar::of_int(F5, 3));
    CHECK_THROWS_AS(parse_scalar(Q, "x"), ParseError);
}

TEST_CASE("monicize") {
    // 2t^2 - 4t + 2 -> t^2 - 2t + 1
    Polynomial p = Polynomial::from_ints(Q, {2, -4, 2});
    CHECK(monicize(p) == Polynomial::from_ints(Q, {1, -2, 1}));
    // already monic
    Polynomial t2 = Polynomial::from_ints(Q, {0, 0, 1});
    CHECK(monicize(t2) == t2);
    // over F5: 3t^2 + 3 -> t^2 + 1, checked by re-multiplication
    Polynomial p5 = Polynomial::from_ints(F5, {3, 0, 3});
    Polynomial m5 = monicize(p5);
    CHECK(m5.leading().is_one());
    CHECK(m5.scaled(p5.leading()) == p5);
    CHECK_THROWS_AS(monicize(Polynomial::zero(Q)), ZeroPolynomial);
    // idempotent
    CHECK(monicize(m5) == m5);
}

TEST_CASE("poly_trace") {
    CHECK(poly_trace(Polynomial::from_ints(Q, {2, -3, 1})) == qs(3));
    CHECK(poly_trace(Polynomial::from_ints(Q, {2, -4, 2})) == qs(2));
    CHECK(poly_trace(Polynomial::from_ints(Q, {0, 0, 1})) == qs(0));
    CHECK_THROWS_AS(poly_trace(Polynomial::from_ints(Q, {5})), ConstantPolynomial);
}

TEST_CASE("split_quadratic") {
    // t^2 - 3t + 2 = (t-1)(t-2)
    QuadraticTarget t = split_quadratic(Polynomial::from_ints(Q, {2, -3, 1}));
    CHECK(t.x == qs(1));
    CHECK(t.y == qs(2));
    CHECK(t.trace == qs(3));
    // t^2 + t + 1 has no roots over F2
    CHECK_THROWS_AS(split_quadratic(Polynomial::from_ints(F2, {1, 1, 1})), NotSplit);
    // t^2 - t over any field
    QuadraticTarget idem = split_quadratic(Polynomial::from_ints(F3, {0, -1, 1}));
    CHECK(idem.x == Scalar::zero(F3));
    CHECK(idem.y == Scalar::one(F3));
    CHECK(idem.trace == Scalar::one(F3));
    CHECK_THROWS_AS(split_quadratic(Polynomial::from_ints(Q, {1, 1})), WrongDegree);
    // double root over F2 with the char-2 pitfall sidestepped: (t-1)^2 = t^2+1
    QuadraticTarget dbl = split_quadratic(Polynomial::from_ints(F2, {1, 0, 1}));
    CHECK(dbl.x == Scalar::one(F2));
    CHECK(dbl.y == Scalar::one(F2));
    // rational non-integer roots: (t-1/2)(t-1/3) = t^2 - 5/6 t + 1/6
    Polynomial frac(Q, {qs(1, 6), qs(-5, 6), qs(1)});
    QuadraticTarget ft = split_quadratic(frac);
    CHECK(ft.x == qs(1, 3));
    CHECK(ft.y == qs(1, 2));
    // non-square discriminant over Q
    CHECK_THROWS_AS(split_quadratic(Polynomial::from_ints(Q, {-2, 0, 1})), NotSplit);
}

TEST_CASE("split roots satisfy p(x) = p(y) = 0 and reconstruct the monic polynomial") {
    std::mt19937_64 rng(0);
    auto check_target = [](const QuadraticTarget& t) {
        CHECK(t.monic.eval(t.x).is_zero());
        CHECK(t.monic.eval(t.y).is_zero());
        Polynomial rebuilt = Polynomial::linear_root(t.x) * Polynomial::linear_root(t.y);
        CHECK(rebuilt == t.monic);
        CHECK(t.trace == t.x + t.y);
        CHECK(!(t.y < t.x));
    };
    for (int i = 0; i < 200; ++i) {
        long long a = static_cast<long long>(rng() % 19) - 9;
        long long b = static_cast<long long>(rng() % 19) - 9;
        long long lead = 1 + static_cast<long long>(rng() % 3);
        // lead (t-a)(t-b)
        Polynomial p = Polynomial::linear_root(qs(a)) * Polynomial::linear_root(qs(b));
        check_target(split_quadratic(p.scaled(qs(lead))));
    }
    for (const FieldSpec& f : {F2, F3, F5}) {
        for (std::int64_t a = 0; a < f.characteristic; ++a)
            for (std::int64_t b = 0; b < f.characteristic; ++b) {
                Polynomial p = Polynomial::linear_root(Scalar::of_int(f, a)) *
                               Polynomial::linear_root(Scalar::of_int(f, b));
                check_target(split_quadratic(p));
            }
    }
}

TEST_CASE("canonical_shift") {
    auto t2 = [](const FieldSpec& f) { return split_quadratic(Polynomial::from_ints(f, {0, 0, 1})); };
    // (t^2, t^2, t^2) -> c = 0, a = (0,0,0)
    auto [c0, a0] = canonical_shift({t2(Q), t2(Q), t2(Q)});
    CHECK(c0.is_zero());
    for (const auto& a : a0) CHECK(a.is_zero());
    // (t^2 - t) x3 -> c = 0, a = (1,1,1)
    QuadraticTarget idem = split_quadratic(Polynomial::from_ints(Q, {0, -1, 1}));
    auto [c1, a1] = canonical_shift({idem, idem, idem});
    CHECK(c1.is_zero());
    for (const auto& a : a1) CHECK(a.is_one());
    // ((t-1)(t-2), t^2, t^2 - t) -> c = 1, a = (1, 0, 1)
    QuadraticTarget m = split_quadratic(Polynomial::from_ints(Q, {2, -3, 1}));
    auto [c2, a2] = canonical_shift({m, t2(Q), idem});
    CHECK(c2 == qs(1));
    CHECK(a2[0] == qs(1));
    CHECK(a2[1] == qs(0));
    CHECK(a2[2] == qs(1));
    // verify by exact expansion: p(v + x) has root gap structure q(w) = w^2 - a w
    // substituting w = v - x into p gives w(w - (y-x))
    for (const QuadraticTarget& t : {m, idem}) {
        Polynomial shifted = t.monic.shifted_var(t.x); // p(w + x)
        Polynomial expected(Q, {Scalar::zero(Q), -(t.gap()), Scalar::one(Q)});
        CHECK(shifted == expected);
    }
    CHECK_THROWS_AS(canonical_shift({t2(Q), t2(F2), t2(Q)}), FieldMismatch);
}

TEST_CASE("polynomial division and gcd") {
    Polynomial a = Polynomial::from_ints(Q, {2, -3, 1}); // (t-1)(t-2)
    Polynomial b = Polynomial::from_ints(Q, {-1, 1});    // t-1
    auto [quot, rem] = a.divmod(b);
    CHECK(rem.is_zero());
    CHECK(quot == Polynomial::from_ints(Q, {-2, 1}));
    CHECK(Polynomial::gcd(a, b) == b);
    Polynomial c = Polynomial::from_ints(Q, {0, 1}); // t
    CHECK(Polynomial::gcd(a, c) == Polynomial::from_ints(Q, {1}));
}
