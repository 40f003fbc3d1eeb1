#ifndef QSUM_FINITE_DIM_HPP
#define QSUM_FINITE_DIM_HPP

#include "qsum/certificate.hpp"

namespace qsum {

/// The invariant-subspace closure
/// W + a(W) + b(W) + c(W) + sum over (e,f) of (ef)(W), verified stable under
/// a, b and c by exact membership. Throws NotQuadratic when stability fails
/// (the declared hypotheses did not hold).
std::vector<VectorFin> invariant_closure(const std::vector<VectorFin>& w_basis, const OpPtr& a, const OpPtr& b,
                                         const OpPtr& c);

/// Similarity-class data of a finite-rank deviation w = u - lambda id.
struct FiniteRankClass {
    MatrixFin representative;
    Index n_of_w;
};

std::pair<Scalar, FiniteRankClass> finite_rank_class(const OpPtr& u);

struct LambdaStableWitness {
    Index q;
    std::array<MatrixFin, 3> parts; // sized n + q, summing to (A + lambda I) (+) lambda I_q
};

/// Searches q = 0..q_max for p_i-annihilated matrices summing to
/// (A + lambda I_n) (+) lambda I_q: root-combination shortcuts, a chain
/// tiling for nilpotent square-zero instances, then bounded exhaustive
/// enumeration over small prime fields. Throws SearchFailed (not a proof of
/// impossibility) or ConditionViolated (necessity).
LambdaStableWitness lambda_stable_search(const MatrixFin& a, const Scalar& lambda,
                                         const std::array<QuadraticTarget, 3>& targets, Index q_max);

/// The finite-rank theorem, (ii) => (i): matrix witness on the finite part,
/// scalar-identity decomposition on the rest.
ThreeSumCertificate finite_rank_decompose(const OpPtr& u, const std::array<QuadraticTarget, 3>& targets,
                                          Index q_max, Index prefix);

} // namespace qsum

#endif
