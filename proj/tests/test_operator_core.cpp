#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qsum/classify.hpp"

using namespace qsum;

namespace {

const FieldSpec Q = FieldSpec::rationals();
const FieldSpec F2 = FieldSpec::prime(2);

VectorFin unit(const FieldSpec& f, Index i) { return VectorFin::unit(f, i); }

// staggered square-zero A: e_{2k} -> e_{2k+1}, e_{2k+1} -> 0
OpPtr staggered(const FieldSpec& f) {
    PeriodicBands b;
    b.period = 2;
    b.bands.push_back(BandEntry{1, {Scalar::one(f), Scalar::zero(f)}});
    return make_banded(f, b);
}

OpPtr random_corpus_op(const FieldSpec& f, std::mt19937_64& rng) {
    switch (rng() % 6) {
        case 0: return make_shift(f);
        case 1: return make_downshift(f);
        case 2: return staggered(f);
        case 3: return make_scalar_id(Scalar::of_int(f, static_cast<long long>(rng() % 5)));
        case 4: {
            std::map<Index, VectorFin> cols;
            VectorFin v(f);
            v.set(static_cast<Index>(rng() % 6), Scalar::of_int(f, 1 + static_cast<long long>(rng() % 3)));
            cols.emplace(static_cast<Index>(rng() % 4), v);
            return make_patch(make_shift(f), std::move(cols));
        }
        default:
            return make_companion_sum({Polynomial::from_ints(f, {0, 0, 1})});
    }
}

VectorFin random_vec(const FieldSpec& f, std::mt19937_64& rng) {
    VectorFin v(f);
    for (int i = 0; i < 4; ++i)
        v.set(static_cast<Index>(rng() % 12), Scalar::of_int(f, static_cast<long long>(rng() % 7) - 3));
    return v;
}

} // namespace

TEST_CASE("apply on basic constructors") {
    CHECK(apply(make_shift(Q), unit(Q, 0)) == unit(Q, 1));
    CHECK(apply(make_downshift(Q), unit(Q, 0)).is_zero());
    CHECK(apply(make_downshift(Q), unit(Q, 5)) == unit(Q, 4));
    // patched column
    VectorFin img(Q);
    img.set(0, Scalar::one(Q));
    img.set(2, Scalar::one(Q));
    std::map<Index, VectorFin> cols;
    cols.emplace(0, img);
    OpPtr p = make_patch(make_shift(Q), std::move(cols));
    CHECK(apply(p, unit(Q, 0)) == img);
    CHECK(apply(p, unit(Q, 1)) == unit(Q, 2));
}

TEST_CASE("lazy combination nodes") {
    OpPtr s = make_shift(Q);
    CHECK(apply(op_sub(s, s), unit(Q, 5)).is_zero());
    CHECK(apply(op_compose(s, s), unit(Q, 0)) == unit(Q, 2));
    CHECK(apply(op_scale(Scalar::of_int(Q, 2), make_downshift(Q)), unit(Q, 1)) ==
          unit(Q, 0).scaled(Scalar::of_int(Q, 2)));
    CHECK_THROWS_AS(op_add(make_shift(Q), make_shift(F2)), FieldMismatch);
}

TEST_CASE("companion block columns") {
    // cycle (t^2): blocks of size 2, u e_{2k} = e_{2k+1}, u e_{2k+1} = 0
    OpPtr c = make_companion_sum({Polynomial::from_ints(Q, {0, 0, 1})});
    CHECK(op_column(c, 0) == unit(Q, 1));
    CHECK(op_column(c, 1).is_zero());
    CHECK(op_column(c, 4) == unit(Q, 5));
    // (t-1)^2 = t^2 - 2t + 1: u e_1 = -e_0 + 2 e_1
    OpPtr j = make_companion_sum({Polynomial::from_ints(Q, {1, -2, 1})});
    VectorFin col = op_column(j, 1);
    CHECK(col.coeff(0) == Scalar::of_int(Q, -1));
    CHECK(col.coeff(1) == Scalar::of_int(Q, 2));
    // mixed cycle (t^2, t - 3): sizes 2 + 1
    OpPtr mix = make_companion_sum({Polynomial::from_ints(Q, {0, 0, 1}), Polynomial::from_ints(Q, {-3, 1})});
    CHECK(op_column(mix, 0) == unit(Q, 1));
    CHECK(op_column(mix, 1).is_zero());
    CHECK(op_column(mix, 2) == unit(Q, 2).scaled(Scalar::of_int(Q, 3)));
    CHECK(op_column(mix, 3) == unit(Q, 4));
}

TEST_CASE("direct sum interleaving") {
    OpPtr d = make_direct_sum(make_shift(Q), make_scalar_id(Scalar::of_int(Q, 7)));
    CHECK(op_column(d, 0) == unit(Q, 2));                                  // left e_0 -> e_1 becomes 0 -> 2
    CHECK(op_column(d, 1) == unit(Q, 1).scaled(Scalar::of_int(Q, 7)));     // right is 7 id
    CHECK(op_column(d, 4) == unit(Q, 6));
}

TEST_CASE("eval_poly") {
    // p = t^2 on the staggered square-zero operator
    OpPtr a = staggered(Q);
    Polynomial t2 = Polynomial::from_ints(Q, {0, 0, 1});
    for (Index n = 0; n < 16; ++n) CHECK(eval_poly_vec(t2, a, unit(Q, n)).is_zero());
    // p = t^2 - t on the identity
    Polynomial idem = Polynomial::from_ints(Q, {0, -1, 1});
    CHECK(eval_poly_vec(idem, make_scalar_id(Scalar::one(Q)), unit(Q, 3)).is_zero());
    // p = t^2 on the shift
    CHECK(eval_poly_vec(t2, make_shift(Q), unit(Q, 0)) == unit(Q, 2));
}

TEST_CASE("verify_annihilated") {
    Polynomial t2 = Polynomial::from_ints(Q, {0, 0, 1});
    AnnihilationReport ok = verify_annihilated(staggered(Q), t2, 512);
    CHECK(ok.pass);
    AnnihilationReport bad = verify_annihilated(make_shift(Q), t2, 4);
    CHECK(!bad.pass);
    CHECK(*bad.first_fail == 0);
    Polynomial idem = Polynomial::from_ints(Q, {0, -1, 1});
    CHECK(verify_annihilated(make_scalar_id(Scalar::one(Q)), idem, 100).pass);
}

TEST_CASE("linearity on random corpus operators and vectors") {
    std::mt19937_64 rng(0);
    for (int trial = 0; trial < 50; ++trial) {
        OpPtr u = random_corpus_op(Q, rng);
        VectorFin x = random_vec(Q, rng), y = random_vec(Q, rng);
        Scalar alpha = Scalar::of_int(Q, static_cast<long long>(rng() % 7) - 3);
        Scalar beta = Scalar::of_int(Q, static_cast<long long>(rng() % 7) - 3);
        VectorFin lhs = apply(u, x.scaled(alpha) + y.scaled(beta));
        VectorFin rhs = apply(u, x).scaled(alpha) + apply(u, y).scaled(beta);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("classify_structure on the spec corpus") {
    // shift: no dominant eigenvalue, non-torsion, free generator e_0
    OperatorClassTags shift_tags = classify_structure(make_shift(Q));
    CHECK(shift_tags.is_torsion == TriState::No);
    CHECK(shift_tags.deviation_rank_finite == TriState::No);
    CHECK(!shift_tags.dominant_candidate);
    REQUIRE(shift_tags.free_part_generators.size() == 1);
    CHECK(shift_tags.free_part_generators[0] == 0);

    // lambda id + finite-rank patch: dominant lambda
    std::map<Index, VectorFin> cols;
    VectorFin v(Q);
    v.set(3, Scalar::one(Q));
    cols.emplace(1, v);
    OpPtr patched = make_patch(make_scalar_id(Scalar::of_int(Q, 5)), std::move(cols));
    OperatorClassTags pt = classify_structure(patched);
    CHECK(pt.deviation_rank_finite == TriState::Yes);
    CHECK(*pt.dominant_candidate == Scalar::of_int(Q, 5));
    CHECK(pt.is_torsion == TriState::Yes);

    // companion sum of t^2 blocks: torsion, no dominant eigenvalue
    OperatorClassTags ct = classify_structure(make_companion_sum({Polynomial::from_ints(Q, {0, 0, 1})}));
    CHECK(ct.is_torsion == TriState::Yes);
    CHECK(ct.deviation_rank_finite == TriState::No);

    // downshift
    OperatorClassTags dt = classify_structure(make_downshift(Q));
    CHECK(dt.is_torsion == TriState::Yes);
    CHECK(dt.deviation_rank_finite == TriState::No);

    // sums with scalars shift the dominant eigenvalue
    OpPtr shifted = op_add(make_scalar_id(Scalar::of_int(Q, 2)), patched);
    OperatorClassTags st = classify_structure(shifted);
    CHECK(*st.dominant_candidate == Scalar::of_int(Q, 7));
}

TEST_CASE("classified dominants have vanishing deviation columns beyond the bound") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        std::map<Index, VectorFin> cols;
        cols.emplace(static_cast<Index>(rng() % 5), random_vec(Q, rng));
        OpPtr u = make_patch(make_scalar_id(Scalar::of_int(Q, static_cast<long long>(rng() % 4))), std::move(cols));
        OperatorClassTags tags = classify_structure(u);
        REQUIRE(tags.dominant_candidate.has_value());
        auto bound = finite_deviation_bound(u, *tags.dominant_candidate);
        REQUIRE(bound.has_value());
        for (Index n = *bound; n < 1000; n += 97) {
            VectorFin col = op_column(u, n);
            col.axpy(-*tags.dominant_candidate, unit(Q, n));
            CHECK(col.is_zero());
        }
    }
}

TEST_CASE("rule table columns and invariance") {
    // downshift written as a rule table with an exceptional column
    TailRule tail;
    tail.start = 1;
    tail.bands.period = 1;
    tail.bands.bands.push_back(BandEntry{-1, {Scalar::one(Q)}});
    OpPtr rt = make_rule_table(Q, {}, tail);
    CHECK(op_column(rt, 0).is_zero());
    CHECK(op_column(rt, 3) == unit(Q, 2));
    auto eq = op_equal_structural(rt, make_downshift(Q));
    REQUIRE(eq.has_value());
    CHECK(*eq);
}

TEST_CASE("structural zero test") {
    OpPtr a = staggered(Q);
    auto z = op_is_zero_structural(op_compose(a, a));
    REQUIRE(z.has_value());
    CHECK(*z);
    auto nz = op_is_zero_structural(op_compose(make_shift(Q), make_shift(Q)));
    REQUIRE(nz.has_value());
    CHECK(!*nz);
}
