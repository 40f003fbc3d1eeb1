#ifndef QSUM_QUADRATIC_HPP
#define QSUM_QUADRATIC_HPP

#include <array>
#include <utility>

#include "qsum/poly.hpp"

namespace qsum {

/// A split monic quadratic with its roots in canonical order (x <= y) and its
/// trace x + y.
struct QuadraticTarget {
    Polynomial monic;
    Scalar x, y;
    Scalar trace;

    const FieldSpec& field() const { return monic.field(); }
    /// y - x, the coefficient of the canonically shifted target t^2 - a t.
    Scalar gap() const { return y - x; }
    /// Constant term of the monic polynomial, x*y.
    Scalar constant() const { return monic.coeff(0); }

    bool operator==(const QuadraticTarget& o) const { return monic == o.monic && x == o.x && y == o.y; }
};

/// Monicizes, finds both roots in the ground field and orders them
/// canonically (ascending). Throws WrongDegree / NotSplit.
QuadraticTarget split_quadratic(const Polynomial& p);

/// Convenience: the target t^2 - a t (roots 0 and a, any field) taken split
/// with canonical root order.
QuadraticTarget shifted_target(const Scalar& a);

/// Reduction to the canonical situation: returns c = x1+x2+x3 and the gaps
/// a_k = y_k - x_k, so that u is a (p1,p2,p3)-sum iff u - c id is a
/// (t^2-a1 t, t^2-a2 t, t^2-a3 t)-sum.
std::pair<Scalar, std::array<Scalar, 3>> canonical_shift(const std::array<QuadraticTarget, 3>& targets);

} // namespace qsum

#endif
