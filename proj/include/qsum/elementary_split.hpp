#ifndef QSUM_ELEMENTARY_SPLIT_HPP
#define QSUM_ELEMENTARY_SPLIT_HPP

#include "qsum/families.hpp"
#include "qsum/quadratic.hpp"

namespace qsum {

struct TwoSplit {
    OpPtr a, b;
};

/// The staggered square-zero pair summing to the shift:
/// A e_{2k} = e_{2k+1}, A e_{2k+1} = 0 and B = shift - A.
TwoSplit split_shift_squarezero(const FieldSpec& f);

/// The idempotent pair summing to the shift over characteristic 2:
/// A e_{2k} = e_{2k+1}, A e_{2k+1} = e_{2k+1}. Throws WrongCharacteristic.
TwoSplit split_shift_idempotent_char2(const FieldSpec& f);

/// Splits an elementary operator (free with the given generators) into
/// A + B = u with p1(A) = 0 and p2(B) = 0. Closed forms cover equal and
/// opposite canonical coefficients; a bounded banded-ansatz search handles
/// the rest or reports SearchFailed. The returned pair is verified on
/// `verify_prefix` columns before being returned.
TwoSplit split_elementary(const OpPtr& u, const VecFamily& gens, const QuadraticTarget& p1,
                          const QuadraticTarget& p2, Index verify_prefix, std::size_t search_budget = 4096);

/// True when the canonical pair (a1, a2) = (y1-x1, y2-x2) is covered by a
/// closed form over this field (used for route planning).
bool split_pair_has_closed_form(const FieldSpec& f, const Scalar& a1, const Scalar& a2);

} // namespace qsum

#endif
