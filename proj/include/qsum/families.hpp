#ifndef QSUM_FAMILIES_HPP
#define QSUM_FAMILIES_HPP

#include <mutex>
#include <set>
#include <vector>

#include "qsum/matrix.hpp"
#include "qsum/op.hpp"

namespace qsum {

/// Closed-form countable family of vectors: a finite explicit list followed
/// by either arithmetic tails (a pattern translated by multiples of a stride,
/// dovetailed round-robin) or a cofinite run of standard basis vectors.
class VecFamily {
  public:
    struct ArithTail {
        VectorFin pattern;
        Index stride;
    };
    struct Cofinite {
        std::set<Index> excluded;
    };

    static VecFamily empty(const FieldSpec& f) { return VecFamily(f); }
    static VecFamily explicit_list(const FieldSpec& f, std::vector<VectorFin> vecs);
    static VecFamily with_tails(const FieldSpec& f, std::vector<VectorFin> head, std::vector<ArithTail> tails);
    static VecFamily cofinite_units(const FieldSpec& f, std::set<Index> excluded, std::vector<VectorFin> extras = {});

    const FieldSpec& field() const { return field_; }
    bool finite() const { return tails_.empty() && !cofinite_; }
    std::size_t finite_size() const { return head_.size(); }
    VectorFin at(std::size_t i) const;

    const std::vector<VectorFin>& head() const { return head_; }
    const std::vector<ArithTail>& tails() const { return tails_; }
    const std::optional<Cofinite>& cofinite() const { return cofinite_; }

  private:
    explicit VecFamily(const FieldSpec& f) : field_(f) {}
    FieldSpec field_;
    std::vector<VectorFin> head_;
    std::vector<ArithTail> tails_;
    std::optional<Cofinite> cofinite_;
};

/// Explicit finite list of (basis vector, image) pairs.
class ExplicitPairsFamily : public BasisFamily {
  public:
    ExplicitPairsFamily(const FieldSpec& f, std::vector<std::pair<VectorFin, VectorFin>> pairs)
        : field_(f), pairs_(std::move(pairs)) {}
    const FieldSpec& field() const override { return field_; }
    std::pair<VectorFin, VectorFin> at(std::size_t i) const override;
    std::string kind() const override { return "explicit_pairs"; }
    std::size_t size() const { return pairs_.size(); }
    const std::vector<std::pair<VectorFin, VectorFin>>& pairs() const { return pairs_; }

  private:
    FieldSpec field_;
    std::vector<std::pair<VectorFin, VectorFin>> pairs_;
};

/// Shared chain cache: w^(c)_k = shifted_carrier^k (gens[c]).
class ChainCache {
  public:
    ChainCache(OpPtr carrier, Scalar shift, VecFamily gens)
        : carrier_(std::move(carrier)), shift_(std::move(shift)), gens_(std::move(gens)) {}
    const VectorFin& chain(std::size_t c, std::size_t k) const;
    const VecFamily& gens() const { return gens_; }
    const OpPtr& carrier() const { return carrier_; }
    const Scalar& shift() const { return shift_; }

  private:
    OpPtr carrier_;
    Scalar shift_; // chains are taken w.r.t. carrier - shift * id
    VecFamily gens_;
    mutable std::mutex mu_;
    mutable std::vector<std::vector<VectorFin>> chains_;
};

/// Chains of the carrier with image 0 everywhere.
class ZeroChainsFamily : public BasisFamily {
  public:
    ZeroChainsFamily(OpPtr carrier, VecFamily gens)
        : cache_(std::move(carrier), Scalar::zero(gens.field()), std::move(gens)), field_(cache_.carrier()->field) {}
    const FieldSpec& field() const override { return field_; }
    std::pair<VectorFin, VectorFin> at(std::size_t i) const override;
    std::string kind() const override { return "zero_chains"; }
    const ChainCache& cache() const { return cache_; }

  private:
    ChainCache cache_;
    FieldSpec field_;
};

/// Banded periodic rule applied within every chain of the carrier:
/// image of w_k = sum of coeff * w_{k+offset} with offsets >= 0, pattern of
/// length `period` indexed by k mod period.
class ChainBandedFamily : public BasisFamily {
  public:
    struct Rule {
        Index period;
        std::vector<std::vector<std::pair<Index, Scalar>>> images; // per residue
    };
    ChainBandedFamily(OpPtr carrier, Scalar shift, VecFamily gens, Rule rule)
        : cache_(std::move(carrier), std::move(shift), std::move(gens)),
          field_(cache_.carrier()->field),
          rule_(std::move(rule)) {}
    const FieldSpec& field() const override { return field_; }
    std::pair<VectorFin, VectorFin> at(std::size_t i) const override;
    std::string kind() const override { return "chain_banded"; }
    const ChainCache& cache() const { return cache_; }
    const Rule& rule() const { return rule_; }

  private:
    ChainCache cache_;
    FieldSpec field_;
    Rule rule_;
};

/// Reflection rule on each chain: viewing the chain as F[t], maps
/// f |-> (alpha t + lambda) f + (beta t + mu) f(sigma - t).
class ChainReflectFamily : public BasisFamily {
  public:
    ChainReflectFamily(OpPtr carrier, Scalar shift, VecFamily gens, Scalar alpha, Scalar lambda, Scalar beta,
                       Scalar mu, Scalar sigma)
        : cache_(std::move(carrier), std::move(shift), std::move(gens)),
          field_(cache_.carrier()->field),
          alpha_(std::move(alpha)),
          lambda_(std::move(lambda)),
          beta_(std::move(beta)),
          mu_(std::move(mu)),
          sigma_(std::move(sigma)) {}
    const FieldSpec& field() const override { return field_; }
    std::pair<VectorFin, VectorFin> at(std::size_t i) const override;
    std::string kind() const override { return "chain_reflect"; }
    const ChainCache& cache() const { return cache_; }
    const Scalar& alpha() const { return alpha_; }
    const Scalar& lambda() const { return lambda_; }
    const Scalar& beta() const { return beta_; }
    const Scalar& mu() const { return mu_; }
    const Scalar& sigma() const { return sigma_; }

  private:
    ChainCache cache_;
    FieldSpec field_;
    Scalar alpha_, lambda_, beta_, mu_, sigma_;
};

/// The sewing tables: chains of x w.r.t. carrier - lambda id, glued to a
/// scalar block with basis v2. Case split on a and on |v2| per the lemma.
class SewingFamily : public BasisFamily {
  public:
    SewingFamily(OpPtr carrier, Scalar lambda, Scalar a, VectorFin x, VecFamily v2)
        : cache_(carrier, lambda, VecFamily::explicit_list(carrier->field, {x})),
          field_(carrier->field),
          lambda_(std::move(lambda)),
          a_(std::move(a)),
          x_(std::move(x)),
          v2_(std::move(v2)) {}
    const FieldSpec& field() const override { return field_; }
    std::pair<VectorFin, VectorFin> at(std::size_t i) const override;
    std::string kind() const override { return "sewing"; }
    const ChainCache& cache() const { return cache_; }
    const Scalar& lambda() const { return lambda_; }
    const Scalar& a() const { return a_; }
    const VectorFin& x() const { return x_; }
    const VecFamily& v2() const { return v2_; }

    /// chain vector e_n = (carrier - lambda)^n (x)
    const VectorFin& chain(std::size_t n) const { return cache_.chain(0, n); }

  private:
    std::pair<VectorFin, VectorFin> entry_for(bool is_chain, std::size_t idx) const;
    ChainCache cache_;
    FieldSpec field_;
    Scalar lambda_, a_;
    VectorFin x_;
    VecFamily v2_;
};

/// A 2x2 block tiled over consecutive pairs of an enumerated vector family.
class PairTiledFamily : public BasisFamily {
  public:
    PairTiledFamily(VecFamily units, MatrixFin block) : units_(std::move(units)), block_(std::move(block)) {}
    const FieldSpec& field() const override { return units_.field(); }
    std::pair<VectorFin, VectorFin> at(std::size_t i) const override;
    std::string kind() const override { return "pair_tiled"; }
    const VecFamily& units() const { return units_; }
    const MatrixFin& block() const { return block_; }

  private:
    VecFamily units_;
    MatrixFin block_;
};

/// Scalar multiple of the identity on an enumerated family.
class DiagFamily : public BasisFamily {
  public:
    DiagFamily(VecFamily units, Scalar value) : units_(std::move(units)), value_(std::move(value)) {}
    const FieldSpec& field() const override { return units_.field(); }
    std::pair<VectorFin, VectorFin> at(std::size_t i) const override {
        VectorFin b = units_.at(i);
        return {b, b.scaled(value_)};
    }
    std::string kind() const override { return "diag_family"; }
    const VecFamily& units() const { return units_; }
    const Scalar& value() const { return value_; }

  private:
    VecFamily units_;
    Scalar value_;
};

/// Round-robin union of sub-families (finite parts drop out once exhausted).
class CompositeFamily : public BasisFamily {
  public:
    CompositeFamily(const FieldSpec& f, std::vector<FamilyPtr> parts, std::vector<std::optional<std::size_t>> sizes)
        : field_(f), parts_(std::move(parts)), sizes_(std::move(sizes)) {}
    const FieldSpec& field() const override { return field_; }
    std::pair<VectorFin, VectorFin> at(std::size_t i) const override;
    std::string kind() const override { return "composite"; }
    const std::vector<FamilyPtr>& parts() const { return parts_; }
    const std::vector<std::optional<std::size_t>>& sizes() const { return sizes_; }

  private:
    FieldSpec field_;
    std::vector<FamilyPtr> parts_;
    std::vector<std::optional<std::size_t>> sizes_; // nullopt = infinite
};

} // namespace qsum

#endif
