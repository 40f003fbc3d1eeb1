#include "qsum/scalar_sums.hpp"

#include "qsum/errors.hpp"

namespace qsum {

std::optional<ScalarSumWitness> scalar_is_sum(const Scalar& lambda, const std::array<QuadraticTarget, 3>& t) {
    for (const auto& q : t) require_same_field(lambda.field(), q.field());
    for (int mask = 0; mask < 8; ++mask) {
        std::array<Scalar, 3> parts = {
            (mask & 1) ? t[0].y : t[0].x,
            (mask & 2) ? t[1].y : t[1].x,
            (mask & 4) ? t[2].y : t[2].x,
        };
        if (parts[0] + parts[1] + parts[2] == lambda) return ScalarSumWitness{parts, lambda};
    }
    return std::nullopt;
}

bool trace_condition(const Scalar& lambda, const std::array<QuadraticTarget, 3>& t) {
    for (const auto& q : t) require_same_field(lambda.field(), q.field());
    Scalar two = Scalar::of_int(lambda.field(), 2);
    return two * lambda == t[0].trace + t[1].trace + t[2].trace;
}

TwoByTwoTriple two_by_two_identity_triple(const Scalar& lambda, const std::array<QuadraticTarget, 3>& t) {
    const FieldSpec& f = lambda.field();
    if (!trace_condition(lambda, t))
        throw ConditionViolated("2*lambda = tr p1 + tr p2 + tr p3 fails");

    Scalar x = t[0].x;
    Scalar beta = t[1].trace, gamma = t[2].trace;
    Scalar one = Scalar::one(f);

    // det B = p2(0) fixes mu, det C = p3(0) fixes nu
    Scalar mu = -t[1].constant();
    MatrixFin b(f, 2);
    b.set(0, 1, mu);
    b.set(1, 0, one);
    b.set(1, 1, beta);

    Scalar c11 = lambda - x, c22 = gamma + x - lambda;
    Scalar nu = t[2].constant() - c11 * c22;
    MatrixFin c(f, 2);
    c.set(0, 0, c11);
    c.set(0, 1, nu);
    c.set(1, 0, -one);
    c.set(1, 1, c22);

    MatrixFin a = MatrixFin::identity(f, 2).scaled(lambda) - b - c;

    TwoByTwoTriple triple{a, b, c};
    if (!eval_poly_mat(t[0].monic, a).is_zero() || !eval_poly_mat(t[1].monic, b).is_zero() ||
        !eval_poly_mat(t[2].monic, c).is_zero())
        throw Error("two-by-two construction failed its annihilation check");
    return triple;
}

OpPtr tile_two_by_two(const MatrixFin& m) {
    if (m.size() != 2) throw Error("tile_two_by_two expects a 2x2 matrix");
    const FieldSpec& f = m.field();
    // pairs (e_{2k}, e_{2k+1}): column 2k gets m00 e_{2k} + m10 e_{2k+1},
    // column 2k+1 gets m01 e_{2k} + m11 e_{2k+1}
    PeriodicBands bands;
    bands.period = 2;
    bands.bands.push_back(BandEntry{0, {m.at(0, 0), m.at(1, 1)}});
    bands.bands.push_back(BandEntry{1, {m.at(1, 0), Scalar::zero(f)}});
    bands.bands.push_back(BandEntry{-1, {Scalar::zero(f), m.at(0, 1)}});
    return make_banded(f, bands);
}

ScalarIdentityDecomposition scalar_identity_decomposition(const Scalar& lambda,
                                                          const std::array<QuadraticTarget, 3>& t) {
    ScalarIdentityDecomposition out{{nullptr, nullptr, nullptr}, false, std::nullopt, std::nullopt};
    if (auto w = scalar_is_sum(lambda, t)) {
        out.diagonal = true;
        out.witness = w;
        for (int i = 0; i < 3; ++i) out.summands[static_cast<std::size_t>(i)] = make_scalar_id(w->parts[static_cast<std::size_t>(i)]);
        return out;
    }
    if (!trace_condition(lambda, t))
        throw ConditionViolated(
            "lambda is not a (p1,p2,p3)-sum and 2*lambda = tr p1 + tr p2 + tr p3 fails");
    TwoByTwoTriple triple = two_by_two_identity_triple(lambda, t);
    out.tiles = triple;
    out.summands = {tile_two_by_two(triple.a), tile_two_by_two(triple.b), tile_two_by_two(triple.c)};
    return out;
}

} // namespace qsum
