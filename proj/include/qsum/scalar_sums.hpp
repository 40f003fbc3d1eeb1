#ifndef QSUM_SCALAR_SUMS_HPP
#define QSUM_SCALAR_SUMS_HPP

#include <array>
#include <optional>

#include "qsum/matrix.hpp"
#include "qsum/op.hpp"
#include "qsum/quadratic.hpp"

namespace qsum {

/// lambda = x1 + x2 + x3 with each x_i a root of its target.
struct ScalarSumWitness {
    std::array<Scalar, 3> parts;
    Scalar target;
};

/// 2x2 matrices A + B + C = lambda I with p_i-annihilations, built from the
/// determinant equations of the lambda-identity proposition.
struct TwoByTwoTriple {
    MatrixFin a, b, c;
};

/// Enumerates the eight root combinations in canonical order.
std::optional<ScalarSumWitness> scalar_is_sum(const Scalar& lambda, const std::array<QuadraticTarget, 3>& targets);

/// Exact test of 2 lambda = tr p1 + tr p2 + tr p3.
bool trace_condition(const Scalar& lambda, const std::array<QuadraticTarget, 3>& targets);

/// Requires the trace condition; throws ConditionViolated otherwise.
TwoByTwoTriple two_by_two_identity_triple(const Scalar& lambda, const std::array<QuadraticTarget, 3>& targets);

/// The three summands of lambda id as structured operators: a diagonal
/// witness triple when one exists, otherwise the 2x2 triple tiled over basis
/// pairs (e_{2k}, e_{2k+1}). Throws ConditionViolated citing both failed
/// conditions when neither applies.
struct ScalarIdentityDecomposition {
    std::array<OpPtr, 3> summands;
    bool diagonal; // true when a scalar witness was used
    std::optional<ScalarSumWitness> witness;
    std::optional<TwoByTwoTriple> tiles;
};

ScalarIdentityDecomposition scalar_identity_decomposition(const Scalar& lambda,
                                                          const std::array<QuadraticTarget, 3>& targets);

/// The tiled structured operator for one 2x2 block repeated over pairs
/// (e_{2k}, e_{2k+1}).
OpPtr tile_two_by_two(const MatrixFin& m);

} // namespace qsum

#endif
