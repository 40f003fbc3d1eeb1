#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qsum/scalar_sums.hpp"

using namespace qsum;

namespace {

const FieldSpec Q = FieldSpec::rationals();
const FieldSpec F2 = FieldSpec::prime(2);
const FieldSpec F3 = FieldSpec::prime(3);
const FieldSpec F5 = FieldSpec::prime(5);

QuadraticTarget sq(const FieldSpec& f) { return split_quadratic(Polynomial::from_ints(f, {0, 0, 1})); }
QuadraticTarget idem(const FieldSpec& f) { return split_quadratic(Polynomial::from_ints(f, {0, -1, 1})); }

// independent oracle: brute force over the eight root combinations
bool oracle_is_sum(const Scalar& lambda, const std::array<QuadraticTarget, 3>& t) {
    std::array<std::array<Scalar, 2>, 3> roots = {{{t[0].x, t[0].y}, {t[1].x, t[1].y}, {t[2].x, t[2].y}}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                if (roots[0][static_cast<std::size_t>(i)] + roots[1][static_cast<std::size_t>(j)] +
                        roots[2][static_cast<std::size_t>(k)] ==
                    lambda)
                    return true;
    return false;
}

std::vector<QuadraticTarget> all_split_targets(const FieldSpec& f) {
    std::vector<QuadraticTarget> out;
    for (std::int64_t a = 0; a < f.characteristic; ++a)
        for (std::int64_t b = a; b < f.characteristic; ++b) {
            Polynomial p = Polynomial::linear_root(Scalar::of_int(f, a)) *
                           Polynomial::linear_root(Scalar::of_int(f, b));
            out.push_back(split_quadratic(p));
        }
    return out;
}

} // namespace

TEST_CASE("scalar_is_sum spec examples") {
    auto w0 = scalar_is_sum(Scalar::zero(Q), {sq(Q), sq(Q), sq(Q)});
    REQUIRE(w0.has_value());
    for (const auto& p : w0->parts) CHECK(p.is_zero());

    auto w2 = scalar_is_sum(Scalar::of_int(Q, 2), {idem(Q), idem(Q), idem(Q)});
    REQUIRE(w2.has_value());
    CHECK(w2->parts[0] + w2->parts[1] + w2->parts[2] == Scalar::of_int(Q, 2));

    CHECK(!scalar_is_sum(Scalar::one(F3), {sq(F3), sq(F3), sq(F3)}).has_value());
}

TEST_CASE("scalar_is_sum agrees with the brute-force oracle") {
    for (const FieldSpec& f : {F2, F3, F5}) {
        auto targets = all_split_targets(f);
        for (const auto& t1 : targets)
            for (const auto& t2 : targets)
                for (const auto& t3 : targets)
                    for (std::int64_t lam = 0; lam < f.characteristic; ++lam) {
                        Scalar l = Scalar::of_int(f, lam);
                        std::array<QuadraticTarget, 3> t = {t1, t2, t3};
                        auto w = scalar_is_sum(l, t);
                        CHECK(w.has_value() == oracle_is_sum(l, t));
                        if (w) {
                            CHECK(w->parts[0] + w->parts[1] + w->parts[2] == l);
                            CHECK(t[0].monic.eval(w->parts[0]).is_zero());
                            CHECK(t[1].monic.eval(w->parts[1]).is_zero());
                            CHECK(t[2].monic.eval(w->parts[2]).is_zero());
                        }
                    }
    }
    // 500 random rational cases
    std::mt19937_64 rng(0);
    auto rnd_target = [&]() {
        long long a = static_cast<long long>(rng() % 11) - 5;
        long long b = static_cast<long long>(rng() % 11) - 5;
        return split_quadratic(Polynomial::linear_root(Scalar::of_int(Q, a)) *
                               Polynomial::linear_root(Scalar::of_int(Q, b)));
    };
    for (int i = 0; i < 500; ++i) {
        std::array<QuadraticTarget, 3> t = {rnd_target(), rnd_target(), rnd_target()};
        Scalar lam = Scalar::of_int(Q, static_cast<long long>(rng() % 31) - 15);
        CHECK(scalar_is_sum(lam, t).has_value() == oracle_is_sum(lam, t));
    }
}

TEST_CASE("trace_condition") {
    CHECK(trace_condition(Scalar::one(F2), {sq(F2), sq(F2), sq(F2)}));
    CHECK(trace_condition(Scalar::zero(Q), {sq(Q), sq(Q), sq(Q)}));
    CHECK(!trace_condition(Scalar::one(Q), {sq(Q), sq(Q), sq(Q)}));
}

TEST_CASE("two_by_two_identity_triple spec examples") {
    // F2, lambda = 1, (t^2 x3)
    TwoByTwoTriple t = two_by_two_identity_triple(Scalar::one(F2), {sq(F2), sq(F2), sq(F2)});
    MatrixFin b_expected(F2, 2);
    b_expected.set(1, 0, Scalar::one(F2));
    CHECK(t.b == b_expected);
    MatrixFin c_expected(F2, 2);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) c_expected.set(i, j, Scalar::one(F2));
    CHECK(t.c == c_expected);
    MatrixFin a_expected(F2, 2);
    a_expected.set(0, 1, Scalar::one(F2));
    CHECK(t.a == a_expected);
    CHECK((t.a * t.a).is_zero());
    CHECK((t.b * t.b).is_zero());
    CHECK((t.c * t.c).is_zero());
    CHECK(t.a + t.b + t.c == MatrixFin::identity(F2, 2));

    // Q, lambda = 0, (t^2 x3): degenerate but annihilated
    TwoByTwoTriple z = two_by_two_identity_triple(Scalar::zero(Q), {sq(Q), sq(Q), sq(Q)});
    CHECK((z.a * z.a).is_zero());
    CHECK((z.b * z.b).is_zero());
    CHECK((z.c * z.c).is_zero());
    CHECK((z.a + z.b + z.c).is_zero());

    // Q, lambda = 3/2, (t^2 - t x3): 2 lambda = 3 = sum of traces
    Scalar lam = Scalar::fraction(Q, 3, 2);
    TwoByTwoTriple h = two_by_two_identity_triple(lam, {idem(Q), idem(Q), idem(Q)});
    CHECK(eval_poly_mat(idem(Q).monic, h.a).is_zero());
    CHECK(eval_poly_mat(idem(Q).monic, h.b).is_zero());
    CHECK(eval_poly_mat(idem(Q).monic, h.c).is_zero());
    CHECK(h.a + h.b + h.c == MatrixFin::identity(Q, 2).scaled(lam));

    CHECK_THROWS_AS(two_by_two_identity_triple(Scalar::one(Q), {sq(Q), sq(Q), sq(Q)}), ConditionViolated);
}

TEST_CASE("random triples meeting the trace condition verify exactly") {
    std::mt19937_64 rng(7);
    int done = 0;
    std::vector<FieldSpec> fields = {F2, F3, F5, Q};
    while (done < 200) {
        const FieldSpec& f = fields[rng() % fields.size()];
        auto rnd_root = [&]() {
            return Scalar::of_int(f, static_cast<long long>(rng() % 9) - (f.kind == FieldKind::Rationals ? 4 : 0));
        };
        std::array<QuadraticTarget, 3> t = {
            split_quadratic(Polynomial::linear_root(rnd_root()) * Polynomial::linear_root(rnd_root())),
            split_quadratic(Polynomial::linear_root(rnd_root()) * Polynomial::linear_root(rnd_root())),
            split_quadratic(Polynomial::linear_root(rnd_root()) * Polynomial::linear_root(rnd_root()))};
        Scalar sum_tr = t[0].trace + t[1].trace + t[2].trace;
        Scalar two = Scalar::of_int(f, 2);
        if (f.characteristic == 2) {
            if (!sum_tr.is_zero()) continue; // no solution of 2 lambda = sum
        }
        Scalar lam = f.characteristic == 2 ? Scalar::of_int(f, static_cast<long long>(rng() % 2)) : sum_tr / two;
        if (!trace_condition(lam, t)) continue;
        TwoByTwoTriple tr = two_by_two_identity_triple(lam, t);
        CHECK(eval_poly_mat(t[0].monic, tr.a).is_zero());
        CHECK(eval_poly_mat(t[1].monic, tr.b).is_zero());
        CHECK(eval_poly_mat(t[2].monic, tr.c).is_zero());
        CHECK(tr.a + tr.b + tr.c == MatrixFin::identity(f, 2).scaled(lam));
        ++done;
    }
}

TEST_CASE("scalar_identity_decomposition") {
    // diagonal witness
    ScalarIdentityDecomposition d = scalar_identity_decomposition(Scalar::zero(Q), {sq(Q), sq(Q), sq(Q)});
    CHECK(d.diagonal);
    for (const auto& s : d.summands)
        for (Index n = 0; n < 8; ++n) CHECK(op_column(s, n).is_zero());

    // F2, lambda = 1: tiled, square-zero on prefix 512
    ScalarIdentityDecomposition t = scalar_identity_decomposition(Scalar::one(F2), {sq(F2), sq(F2), sq(F2)});
    CHECK(!t.diagonal);
    Polynomial t2 = Polynomial::from_ints(F2, {0, 0, 1});
    for (const auto& s : t.summands) CHECK(verify_annihilated(s, t2, 512).pass);
    for (Index n = 0; n < 512; ++n) {
        VectorFin total(F2);
        for (const auto& s : t.summands) total = total + op_column(s, n);
        CHECK(total == VectorFin::unit(F2, n));
    }

    // refusal over Q
    CHECK_THROWS_AS(scalar_identity_decomposition(Scalar::one(Q), {sq(Q), sq(Q), sq(Q)}), ConditionViolated);
}

TEST_CASE("refusal completeness: refuses exactly when witness and trace condition both fail") {
    for (const FieldSpec& f : {F2, F3}) {
        auto targets = all_split_targets(f);
        for (const auto& t1 : targets)
            for (const auto& t2 : targets)
                for (const auto& t3 : targets)
                    for (std::int64_t lam = 0; lam < f.characteristic; ++lam) {
                        Scalar l = Scalar::of_int(f, lam);
                        std::array<QuadraticTarget, 3> t = {t1, t2, t3};
                        bool feasible = scalar_is_sum(l, t).has_value() || trace_condition(l, t);
                        bool threw = false;
                        try {
                            scalar_identity_decomposition(l, t);
                        } catch (const ConditionViolated&) {
                            threw = true;
                        }
                        CHECK(threw == !feasible);
                    }
    }
}
