#ifndef QSUM_NONTORSION_HPP
#define QSUM_NONTORSION_HPP

#include "qsum/stratification.hpp"

namespace qsum {

/// Outcome of the non-torsion decomposition lemma: V = W (+) H with
/// F free inside W, W/F finite-dimensional with a PA+ stratification, and
/// u = lambda on H. Everything is presented relative to w = u - lambda id.
struct NonTorsionSplit {
    Scalar lambda;
    std::vector<VectorFin> f_generators; // free module generators (first one is the sewing chain)
    std::vector<Stratum> w_extra;        // PA+ strata of W/F (lifts), possibly empty
    VecFamily h_basis;                   // basis of H (u acts as lambda there)
};

/// Generators of a quasi-maximal free submodule read off the structure tree.
/// Throws PreconditionUnverifiable when no free part is readable.
std::vector<VectorFin> quasi_maximal_free(const OpPtr& u);

/// The sewing lemma as a structured operator: v with v^2 = a v such that
/// (u - v)-iterates of x span F[t]x (+) V2; chains are taken with respect to
/// u - lambda id and u acts as lambda on V2.
OpPtr sewing(const OpPtr& u, const VectorFin& x, const VecFamily& v2, const Scalar& lambda, const Scalar& a);

/// The decomposition lemma at desk scale on structured trees.
NonTorsionSplit nontorsion_decompose(const OpPtr& u);

struct AElementary {
    OpPtr v;          // v^2 = a v
    VecFamily gens;   // free generators of u - v
};

/// The final assembly: v with v^2 = a v and u - v elementary.
AElementary assemble_a_elementary(const OpPtr& u, const NonTorsionSplit& split, const Scalar& a);

} // namespace qsum

#endif
