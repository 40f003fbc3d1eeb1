#ifndef QSUM_CLASSIFY_HPP
#define QSUM_CLASSIFY_HPP

#include <optional>
#include <vector>

#include "qsum/op.hpp"

namespace qsum {

enum class TriState { Yes, No, Unknown };

/// Structural tags derived from the constructor tree, never guessed. Unknown
/// is a legal outcome and routes the pipeline to refusal.
struct OperatorClassTags {
    TriState is_torsion = TriState::Unknown;
    std::vector<Index> free_part_generators; // basis indices of a quasi-maximal free family, when readable
    std::optional<Scalar> dominant_candidate;
    TriState deviation_rank_finite = TriState::Unknown;
};

OperatorClassTags classify_structure(const OpPtr& u);

/// When u = lambda id + finite rank structurally: an index N such that
/// (u - lambda id)(e_n) = 0 for all n >= N.
std::optional<Index> finite_deviation_bound(const OpPtr& u, const Scalar& lambda);

/// When the tree is a scalar shift of a core (sums/differences with scalar
/// multiples of the identity, scalings), peels it off: u = mu id + c * core.
struct ScalarPeel {
    Scalar mu;
    Scalar factor;
    OpPtr core;
};
ScalarPeel peel_scalar(const OpPtr& u);

} // namespace qsum

#endif
