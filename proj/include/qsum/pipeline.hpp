#ifndef QSUM_PIPELINE_HPP
#define QSUM_PIPELINE_HPP

#include "qsum/finite_dim.hpp"
#include "qsum/nontorsion.hpp"

namespace qsum {

enum class Route { NoDominant_Torsion, NoDominant_NonTorsion, FiniteRank, Scalar, Refused, Unresolved };

std::string route_name(Route r);

struct ClassificationReport {
    std::optional<Scalar> dominant;
    std::optional<Index> deviation_bound; // present iff the deviation is structurally finite
    TriState torsion = TriState::Unknown;
    Route route = Route::Unresolved;
    std::string reason; // cited condition for Refused / Unresolved
};

/// Combines the structural tags with the scalar feasibility conditions.
/// Refusals cite the violated condition of the matching theorem.
ClassificationReport classify(const OpPtr& u, const std::array<QuadraticTarget, 3>& targets);

struct Budgets {
    Index q_max = 4;
    std::size_t strat_budget = 4096;
    std::size_t search_budget = 4096;
};

/// Theorem-level decomposition: throws ConditionViolated on refusal,
/// PreconditionUnverifiable / CapExceeded / SearchFailed on backend limits.
/// The returned certificate has been verified on the prefix.
ThreeSumCertificate decompose_three(const OpPtr& u, const std::array<QuadraticTarget, 3>& targets, Index prefix,
                                    const Budgets& budgets = {});

struct VerifyReport {
    bool pass = false;
    std::string detail;
    std::optional<Index> failing_column;
};

/// Independent re-verification of a certificate against u: the sum identity,
/// the three annihilations and the sub-certificates, column by column.
VerifyReport verify_certificate(const OpPtr& u, const ThreeSumCertificate& cert,
                                std::optional<Index> prefix_override = std::nullopt);

struct LC3Result {
    std::array<Scalar, 3> coefficients;
    std::array<OpPtr, 3> idempotents;
    ThreeSumCertificate base;
};

/// u = c1 q1 + c2 q2 + c3 q3 with idempotent q_i, per the linear-combination
/// theorem; auto mode picks the coefficient splitting.
LC3Result lc3(const OpPtr& u, const std::optional<std::array<Scalar, 3>>& coefficients, Index prefix,
              const Budgets& budgets = {});

} // namespace qsum

#endif
