#ifndef QSUM_CERTIFICATE_HPP
#define QSUM_CERTIFICATE_HPP

#include <array>
#include <optional>
#include <string>

#include "qsum/quadratic.hpp"
#include "qsum/scalar_sums.hpp"
#include "qsum/stratification.hpp"

namespace qsum {

/// Construction-specific evidence carried alongside the summands.
struct SubCertificates {
    StratPtr strat;                                    // torsion route
    std::optional<VecFamily> elementary_gens;          // free generators of the elementary part
    std::optional<int> connector_index;                // which summand absorbed the connector / assembly
    std::optional<std::array<MatrixFin, 3>> witness;   // finite-rank route
    std::optional<Index> witness_q;
    std::optional<ScalarSumWitness> scalar_witness;
    std::optional<TwoByTwoTriple> tiles;
};

/// u = summand_1 + summand_2 + summand_3 with p_i(summand_i) = 0, all
/// verified exactly on e_0..e_{verified_prefix-1}.
struct ThreeSumCertificate {
    std::array<OpPtr, 3> summands;
    std::array<QuadraticTarget, 3> targets;
    Index verified_prefix = 0;
    std::string route;
    SubCertificates sub;
};

} // namespace qsum

#endif
