#ifndef QSUM_STRATIFICATION_HPP
#define QSUM_STRATIFICATION_HPP

#include <memory>
#include <optional>
#include <vector>

#include "qsum/classify.hpp"
#include "qsum/families.hpp"
#include "qsum/op.hpp"

namespace qsum {

struct PropertyFlags {
    bool PA = false;
    bool PAplus = false;
    bool PM = false;
    bool good() const { return PAplus && PM; }
};

/// One stratum: a module generator and the dimension of its quotient layer.
/// dim = kInfiniteDim marks an infinite layer.
constexpr Index kInfiniteDim = -1;

struct Stratum {
    VectorFin gen;
    Index dim;
};

/// Ordered family of module generators with a dimension sequence, presented
/// finitely: an explicit list plus an optional symbolic tail. Enumeration is
/// deterministic and covers each stratum exactly once.
class Stratification {
  public:
    struct Entry {
        VectorFin gen;
        Index dim;
        std::optional<VectorFin> successor_gen; // needed at finite-dim strata
    };

    Stratification(OpPtr op) : op_(std::move(op)) {}
    virtual ~Stratification() = default;

    const OpPtr& op() const { return op_; }
    const FieldSpec& field() const { return op_->field; }

    virtual PropertyFlags flags() const = 0;
    virtual Entry entry(std::size_t i) const = 0;
    virtual bool finite() const = 0;
    virtual std::size_t finite_count() const = 0; // valid when finite()
    virtual VectorFin first_gen() const = 0;      // generator at the least index
    /// Module generators of u - connector (the free decomposition the
    /// connector proposition produces).
    virtual VecFamily elementary_generators() const = 0;
    virtual std::string kind() const = 0;

  protected:
    OpPtr op_;
};

using StratPtr = std::shared_ptr<const Stratification>;

/// Index set N: explicit strata, optionally followed by the block
/// strata[tail_begin..] repeated with index translation by `stride`.
class NatStrat : public Stratification {
  public:
    struct Tail {
        std::size_t block_begin;
        Index stride;
    };

    NatStrat(OpPtr op, std::vector<Stratum> strata, std::optional<Tail> tail);

    PropertyFlags flags() const override;
    Entry entry(std::size_t i) const override;
    bool finite() const override { return !tail_.has_value(); }
    std::size_t finite_count() const override { return strata_.size(); }
    VectorFin first_gen() const override { return strata_.front().gen; }
    VecFamily elementary_generators() const override;
    std::string kind() const override { return "nat"; }

    const std::vector<Stratum>& strata() const { return strata_; }
    const std::optional<Tail>& tail() const { return tail_; }

  private:
    Stratum stratum_at(std::size_t i) const;
    std::vector<Stratum> strata_;
    std::optional<Tail> tail_;
};

/// Index set N x N (lex): chain pairs fill the grid, kernel singles sit at
/// the limit positions (k, 0), k >= 1 — the index-2 lemma layout. Kernel and
/// chain generators come from closed-form families; `chain_dim` is the
/// uniform chain layer dimension (2 for the index-2 case).
class GridStrat : public Stratification {
  public:
    GridStrat(OpPtr op, VecFamily kernels, VecFamily chains, Index chain_dim);

    PropertyFlags flags() const override;
    Entry entry(std::size_t i) const override;
    bool finite() const override { return false; }
    std::size_t finite_count() const override { return 0; }
    VectorFin first_gen() const override { return chains_.at(0); }
    VecFamily elementary_generators() const override;
    std::string kind() const override { return "grid"; }

    const VecFamily& kernels() const { return kernels_; }
    const VecFamily& chains() const { return chains_; }
    Index chain_dim() const { return chain_dim_; }

    /// chain index occupying grid position (row, col) under the nu_2 layout
    static std::size_t chain_at(std::size_t row, std::size_t col);

  private:
    VecFamily kernels_;
    VecFamily chains_;
    Index chain_dim_;
    bool kernels_empty_;
};

/// Lexicographic concatenation ({0} x D) cup ({1} x D') of a finite lower
/// stratification with an upper one (the tower lemma).
class TowerStrat : public Stratification {
  public:
    TowerStrat(StratPtr lower, StratPtr upper);

    PropertyFlags flags() const override;
    Entry entry(std::size_t i) const override;
    bool finite() const override { return upper_->finite(); }
    std::size_t finite_count() const override { return lower_->finite_count() + upper_->finite_count(); }
    VectorFin first_gen() const override { return lower_->first_gen(); }
    VecFamily elementary_generators() const override;
    std::string kind() const override { return "tower"; }

    const StratPtr& lower() const { return lower_; }
    const StratPtr& upper() const { return upper_; }

  private:
    StratPtr lower_, upper_;
};

/// Flags of a stratification (computed from the index structure and the
/// dimension sequence).
PropertyFlags check_properties(const Stratification& s);

/// Connector family: acts on the chain basis u^k(x_alpha); chain ends map to
/// a * end - successor generator, everything else to 0.
class StratConnectorFamily : public BasisFamily {
  public:
    StratConnectorFamily(StratPtr strat, Scalar a)
        : strat_(std::move(strat)), a_(std::move(a)), cache_entries_() {}
    const FieldSpec& field() const override { return strat_->field(); }
    std::pair<VectorFin, VectorFin> at(std::size_t i) const override;
    std::string kind() const override { return "strat_connector"; }
    const StratPtr& strat() const { return strat_; }
    const Scalar& a() const { return a_; }

  private:
    const Stratification::Entry& entry_cached(std::size_t i) const;
    const VectorFin& chain_vec(std::size_t i, std::size_t k) const;
    StratPtr strat_;
    Scalar a_;
    mutable std::mutex mu_;
    mutable std::vector<Stratification::Entry> cache_entries_;
    mutable std::vector<std::vector<VectorFin>> cache_chains_;
};

/// The proposition's v with v^2 = a v and u - v elementary. Requires PA and
/// PM; throws PropertyViolated otherwise.
OpPtr connector(const StratPtr& s, const Scalar& a);

struct ElementaryCertificate {
    VecFamily generators;
    Index verified_prefix;
};

/// Exact elimination check that the chains of `gens` under u are independent
/// and their span contains e_0..e_{prefix-1}. Throws NotFreeOnPrefix /
/// SpanGapOnPrefix.
ElementaryCertificate verify_elementary(const OpPtr& u, const VecFamily& gens, Index prefix,
                                        std::size_t pull_budget = 0);

/// Good stratification for (u - lambda id)^2 = 0 without dominant lambda,
/// read off companion-cycle structure. Throws PreconditionUnverifiable.
StratPtr good_strat_index2(const OpPtr& u, const Scalar& lambda);

/// Inductive good-stratification builder for structurally torsion operators
/// with no dominant eigenvalue. Budget caps the search.
StratPtr torsion_good_strat(const OpPtr& u, std::size_t budget = 4096);

/// Tower composition: lower satisfies PA+, upper is good on the quotient.
StratPtr tower_compose(const StratPtr& lower, const StratPtr& upper);

/// Decomposition of a finite-dimensional torsion module given by a matrix:
/// eigen singles of one leftover eigenvalue mu plus monogenous layers of
/// dimension >= 2 (a stratification of the complement).
struct FiniteModuleSplit {
    Scalar mu;
    std::vector<VectorFin> eigen;  // coordinates over the module basis
    std::vector<Stratum> blocks;   // dims >= 2, in stratification order
};
FiniteModuleSplit finite_module_split(const MatrixFin& m, const Scalar& default_mu);

/// u = lambda id + finite rank: splits V into monogenous blocks of dimension
/// >= 2 plus an eigenspace H on which u acts as the scalar mu.
struct SplitDominantResult {
    std::vector<Stratum> blocks;
    Scalar mu;
    VecFamily h_basis;
};
SplitDominantResult split_dominant(const OpPtr& u);

/// Looks for lambda with (u - lambda id)^2 = 0 readable from the structure.
std::optional<Scalar> structural_index2_lambda(const OpPtr& u);

} // namespace qsum

#endif
