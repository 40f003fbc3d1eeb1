#include "qsum/stratification.hpp"

#include <algorithm>
#include <map>

#include "qsum/elim.hpp"
#include "qsum/errors.hpp"

namespace qsum {

// ---- NatStrat ----

NatStrat::NatStrat(OpPtr op, std::vector<Stratum> strata, std::optional<Tail> tail)
    : Stratification(std::move(op)), strata_(std::move(strata)), tail_(std::move(tail)) {
    if (strata_.empty()) throw Error("empty stratification");
    if (tail_) {
        if (tail_->block_begin >= strata_.size()) throw Error("tail block is empty");
        if (tail_->stride <= 0) throw Error("tail stride must be positive");
    }
}

Stratum NatStrat::stratum_at(std::size_t i) const {
    if (i < strata_.size()) return strata_[i];
    if (!tail_) throw Error("stratum index beyond a finite stratification");
    std::size_t block = strata_.size() - tail_->block_begin;
    std::size_t j = i - strata_.size();
    const Stratum& base = strata_[tail_->block_begin + j % block];
    Index shift = tail_->stride * static_cast<Index>(1 + j / block);
    return Stratum{base.gen.translated(shift), base.dim};
}

Stratification::Entry NatStrat::entry(std::size_t i) const {
    Stratum s = stratum_at(i);
    Entry e{s.gen, s.dim, std::nullopt};
    if (s.dim != kInfiniteDim) {
        if (tail_ || i + 1 < strata_.size()) e.successor_gen = stratum_at(i + 1).gen;
    }
    return e;
}

PropertyFlags NatStrat::flags() const {
    PropertyFlags fl;
    auto ge2 = [](Index d) { return d == kInfiniteDim || d >= 2; };
    fl.PA = true;
    for (std::size_t i = 1; i < strata_.size(); ++i)
        if (!ge2(strata_[i].dim)) fl.PA = false;
    if (tail_ && !ge2(strata_[tail_->block_begin].dim)) fl.PA = false; // first tail entry repeats block
    fl.PAplus = fl.PA && ge2(strata_[0].dim);
    fl.PM = tail_.has_value();
    return fl;
}

VecFamily NatStrat::elementary_generators() const {
    std::vector<VectorFin> gens;
    gens.push_back(strata_[0].gen);
    for (std::size_t i = 0; i + 1 < strata_.size(); ++i)
        if (strata_[i].dim == kInfiniteDim) gens.push_back(strata_[i + 1].gen);
    if (tail_) {
        for (std::size_t i = tail_->block_begin; i < strata_.size(); ++i)
            if (strata_[i].dim == kInfiniteDim)
                throw Error("infinite layer inside a periodic tail is unsupported");
    }
    return VecFamily::explicit_list(field(), std::move(gens));
}

// ---- GridStrat ----

GridStrat::GridStrat(OpPtr op, VecFamily kernels, VecFamily chains, Index chain_dim)
    : Stratification(std::move(op)),
      kernels_(std::move(kernels)),
      chains_(std::move(chains)),
      chain_dim_(chain_dim),
      kernels_empty_(kernels_.finite() && kernels_.finite_size() == 0) {
    if (chains_.finite()) throw Error("grid stratification needs infinitely many chains");
    if (kernels_.finite() && kernels_.finite_size() > 0)
        throw Error("grid stratification expects an empty or infinite kernel family");
    if (chain_dim_ < 2) throw Error("grid chain layers must have dimension >= 2");
    if (kernels_empty_) throw Error("use a plain Nat stratification when there are no kernel singles");
}

std::size_t GridStrat::chain_at(std::size_t row, std::size_t col) {
    if (row == 0) return 2 * col;
    // position (row, col) with col >= 1 holds chain j with j+1 = 2^row (2(col-1)+1)
    return (static_cast<std::size_t>(1) << row) * (2 * (col - 1) + 1) - 1;
}

Stratification::Entry GridStrat::entry(std::size_t i) const {
    if (i % 2 == 0) {
        std::size_t j = i / 2;
        // row of chain j: nu_2(j+1); successor chain is j + 2^{row+1}
        std::size_t v = j + 1, row = 0;
        while (v % 2 == 0) {
            v /= 2;
            ++row;
        }
        std::size_t succ = j + (static_cast<std::size_t>(1) << (row + 1));
        return Entry{chains_.at(j), chain_dim_, chains_.at(succ)};
    }
    std::size_t k = (i - 1) / 2;
    // kernel k sits at (k+1, 0); successor (k+1, 1) holds chain 2^{k+1} - 1
    std::size_t succ = (static_cast<std::size_t>(1) << (k + 1)) - 1;
    return Entry{kernels_.at(k), 1, chains_.at(succ)};
}

PropertyFlags GridStrat::flags() const {
    // chain layers fill every successor position; kernel singles sit at limit
    // positions only
    PropertyFlags fl;
    fl.PA = chain_dim_ >= 2;
    fl.PAplus = fl.PA;
    fl.PM = true;
    return fl;
}

VecFamily GridStrat::elementary_generators() const {
    // walk starts: the (0,0) chain plus every kernel single
    std::vector<VectorFin> head;
    head.push_back(chains_.at(0));
    for (const auto& v : kernels_.head()) head.push_back(v);
    return VecFamily::with_tails(field(), std::move(head), kernels_.tails());
}

// ---- TowerStrat ----

TowerStrat::TowerStrat(StratPtr lower, StratPtr upper)
    : Stratification(lower->op()), lower_(std::move(lower)), upper_(std::move(upper)) {
    if (!lower_->finite()) throw Error("tower composition needs a finite lower stratification");
    if (lower_->finite_count() == 0) throw PreconditionUnverifiable("tower composition needs a non-zero lower part");
    require_same_field(lower_->field(), upper_->field());
}

Stratification::Entry TowerStrat::entry(std::size_t i) const {
    std::size_t lc = lower_->finite_count();
    if (i < lc) {
        Entry e = lower_->entry(i);
        if (i + 1 == lc && e.dim != kInfiniteDim) e.successor_gen = upper_->first_gen();
        return e;
    }
    return upper_->entry(i - lc);
}

PropertyFlags TowerStrat::flags() const {
    PropertyFlags lo = lower_->flags(), up = upper_->flags();
    PropertyFlags fl;
    fl.PA = lo.PA && up.PAplus;
    fl.PAplus = lo.PAplus && up.PAplus;
    fl.PM = up.PM;
    return fl;
}

VecFamily TowerStrat::elementary_generators() const {
    for (std::size_t i = 0; i < lower_->finite_count(); ++i)
        if (lower_->entry(i).dim == kInfiniteDim)
            throw Error("infinite layer in the lower part of a tower is unsupported");
    VecFamily up = upper_->elementary_generators();
    std::vector<VectorFin> head;
    head.push_back(lower_->first_gen());
    for (std::size_t i = 1; i < up.head().size(); ++i) head.push_back(up.head()[i]);
    if (up.cofinite()) throw Error("cofinite upper generator family in a tower is unsupported");
    return VecFamily::with_tails(field(), std::move(head), up.tails());
}

PropertyFlags check_properties(const Stratification& s) { return s.flags(); }

// ---- connector ----

const Stratification::Entry& StratConnectorFamily::entry_cached(std::size_t i) const {
    if (i >= cache_entries_.size()) {
        for (std::size_t j = cache_entries_.size(); j <= i; ++j) cache_entries_.push_back(strat_->entry(j));
        cache_chains_.resize(cache_entries_.size());
    }
    return cache_entries_[i];
}

const VectorFin& StratConnectorFamily::chain_vec(std::size_t i, std::size_t k) const {
    entry_cached(i);
    auto& chain = cache_chains_[i];
    if (chain.empty()) chain.push_back(cache_entries_[i].gen);
    while (chain.size() <= k) chain.push_back(apply(strat_->op(), chain.back()));
    return chain[k];
}

std::pair<VectorFin, VectorFin> StratConnectorFamily::at(std::size_t i) const {
    std::lock_guard<std::mutex> lock(mu_);
    // antidiagonal over (stratum s, chain position k), skipping k >= dim_s
    std::size_t r = 0, consumed = 0;
    for (;;) {
        for (std::size_t s = 0; s <= r; ++s) {
            std::size_t k = r - s;
            const auto& e = entry_cached(s);
            if (e.dim != kInfiniteDim && static_cast<Index>(k) >= e.dim) continue;
            if (consumed == i) {
                const VectorFin& basis = chain_vec(s, k);
                bool is_end = e.dim != kInfiniteDim && static_cast<Index>(k) == e.dim - 1;
                if (!is_end) return {basis, VectorFin(field())};
                if (!e.successor_gen) throw Error("stratum end without a successor generator");
                VectorFin img = basis.scaled(a_);
                img.axpy(-Scalar::one(field()), *e.successor_gen);
                return {basis, img};
            }
            ++consumed;
        }
        ++r;
    }
}

OpPtr connector(const StratPtr& s, const Scalar& a) {
    PropertyFlags fl = s->flags();
    if (!fl.PA || !fl.PM) throw PropertyViolated("connector needs properties PA and PM");
    return make_mapped(std::make_shared<StratConnectorFamily>(s, a));
}

// ---- verify_elementary ----

ElementaryCertificate verify_elementary(const OpPtr& u, const VecFamily& gens, Index prefix,
                                        std::size_t pull_budget) {
    if (prefix < 1) throw Error("prefix must be >= 1");
    if (gens.finite() && gens.finite_size() == 0) throw NotFreeOnPrefix("no generators");
    if (pull_budget == 0) pull_budget = 256 + 48 * static_cast<std::size_t>(prefix);
    const FieldSpec& f = u->field;
    ChainCache cache(u, Scalar::zero(f), gens);
    std::optional<std::size_t> count = gens.finite() ? std::optional<std::size_t>(gens.finite_size()) : std::nullopt;
    Eliminator elim(f);
    Index covered = 0;
    std::size_t r = 0;
    for (std::size_t pulls = 0; pulls < pull_budget; ++r) {
        std::size_t row_len = count ? std::min(r + 1, *count) : r + 1;
        for (std::size_t c = 0; c < row_len && pulls < pull_budget; ++c, ++pulls) {
            std::size_t k = r - c;
            const VectorFin& v = cache.chain(c, k);
            if (v.is_zero() || !elim.insert(v))
                throw NotFreeOnPrefix("chain vector u^" + std::to_string(k) + "(x_" + std::to_string(c) +
                                      ") is dependent on the earlier chain vectors");
            while (covered < prefix && elim.contains(VectorFin::unit(f, covered))) ++covered;
            if (covered >= prefix) return ElementaryCertificate{gens, prefix};
        }
    }
    throw SpanGapOnPrefix("basis vector e_" + std::to_string(covered) +
                          " was not reached within the iteration budget");
}

// ---- structural index-2 ----

namespace {

struct CompanionView {
    Scalar mu, factor;       // u = mu id + factor * companion
    const CompanionData* data;
    OpPtr core;
};

std::optional<CompanionView> companion_view(const OpPtr& u) {
    ScalarPeel peel = peel_scalar(u);
    if (!peel.core || peel.core->kind != OpKind::Companion || peel.factor.is_zero()) return std::nullopt;
    return CompanionView{peel.mu, peel.factor, &std::get<CompanionData>(peel.core->data), peel.core};
}

} // namespace

std::optional<Scalar> structural_index2_lambda(const OpPtr& u) {
    ScalarPeel peel = peel_scalar(u);
    if (!peel.core) return peel.mu; // u = mu id, (u - mu)^2 = 0
    if (auto view = companion_view(u)) {
        // every cycle polynomial must be (t-c) or (t-c)^2 for one common c
        std::optional<Scalar> c;
        for (const auto& p : view->data->cycle) {
            std::optional<Scalar> root;
            if (p.degree() == 1) {
                root = -p.coeff(0);
            } else if (p.degree() == 2) {
                // p = t^2 + b t + c0 must equal (t-r)^2, i.e. b = -2r, c0 = r^2
                Scalar b = p.coeff(1), c0 = p.coeff(0);
                const FieldSpec& f = p.field();
                Scalar two = Scalar::of_int(f, 2);
                if (f.characteristic == 2) {
                    if (!b.is_zero()) return std::nullopt;
                    // r^2 = c0: scan the field for a square root (desk scale)
                    std::optional<Scalar> r;
                    for (std::int64_t v = 0; v < f.characteristic; ++v) {
                        Scalar cand = Scalar::of_int(f, v);
                        if (cand * cand == c0) {
                            r = cand;
                            break;
                        }
                    }
                    if (!r) return std::nullopt;
                    root = *r;
                } else {
                    Scalar r = -b / two;
                    if (r * r != c0) return std::nullopt;
                    root = r;
                }
            } else {
                return std::nullopt;
            }
            if (!c)
                c = root;
            else if (*c != *root)
                return std::nullopt;
        }
        if (c) return view->mu + view->factor * (*c);
    }
    return std::nullopt;
}

StratPtr good_strat_index2(const OpPtr& u, const Scalar& lambda) {
    const FieldSpec& f = u->field;
    // verify (u - lambda id)^2 = 0 on a structural basis
    OpPtr w = op_sub(u, make_scalar_id(lambda));
    auto zero = op_is_zero_structural(op_compose(w, w));
    if (!zero || !*zero)
        throw PreconditionUnverifiable("(u - lambda id)^2 = 0 is not verifiable from the structure");

    auto view = companion_view(u);
    if (!view) {
        if (!peel_scalar(u).core) throw PreconditionUnverifiable("lambda is dominant (u is a scalar multiple of the identity)");
        throw PreconditionUnverifiable("structure does not expose the kernel/chain split");
    }

    const CompanionData& comp = *view->data;
    Index total = 0;
    std::vector<Index> offsets;
    for (const auto& p : comp.cycle) {
        offsets.push_back(total);
        total += p.degree();
    }
    std::vector<VecFamily::ArithTail> kernel_tails, chain_tails;
    for (std::size_t i = 0; i < comp.cycle.size(); ++i) {
        VecFamily::ArithTail t{VectorFin::unit(f, offsets[i]), total};
        if (comp.cycle[i].degree() == 1)
            kernel_tails.push_back(std::move(t));
        else
            chain_tails.push_back(std::move(t));
    }
    if (chain_tails.empty())
        throw PreconditionUnverifiable("lambda is dominant (every block lies in the kernel of u - lambda id)");

    VecFamily chains = VecFamily::with_tails(f, {}, chain_tails);
    if (kernel_tails.empty()) {
        // plain N-indexed stratification: one cycle of chain layers repeated
        std::vector<Stratum> strata;
        for (std::size_t j = 0; j < chain_tails.size(); ++j) strata.push_back(Stratum{chains.at(j), 2});
        return std::make_shared<NatStrat>(u, std::move(strata), NatStrat::Tail{0, total});
    }
    VecFamily kernels = VecFamily::with_tails(f, {}, kernel_tails);
    return std::make_shared<GridStrat>(u, std::move(kernels), std::move(chains), 2);
}

// ---- torsion builder ----

namespace {

struct EigenCheck {
    bool eigen;
    Scalar lambda;
};

EigenCheck eigen_check(const Eliminator& elim, const OpPtr& u, const VectorFin& r) {
    const FieldSpec& f = u->field;
    VectorFin w = elim.reduce(apply(u, r));
    if (w.is_zero()) return {true, Scalar::zero(f)};
    Index lead = r.min_index();
    Scalar lam = w.coeff(lead) / r.coeff(lead);
    if (!lam.is_zero() && w == r.scaled(lam)) return {true, lam};
    if (lam.is_zero()) return {false, Scalar::zero(f)};
    return {false, Scalar::zero(f)};
}

struct ChainGrowth {
    std::vector<VectorFin> vecs; // reduced modulo the outer span and each other
};

// chain of r under u, reduced modulo elim and the chain itself
ChainGrowth grow_chain(const Eliminator& elim, const OpPtr& u, const VectorFin& r, std::size_t cap) {
    ChainGrowth g;
    Eliminator local = elim;
    VectorFin v = local.reduce(r);
    while (!v.is_zero() && local.insert(v)) {
        g.vecs.push_back(v);
        if (g.vecs.size() > cap) throw CapExceeded("chain growth exceeded the budget");
        v = local.reduce(apply(u, v));
    }
    return g;
}

// quotient column of u at checkpoint p: entries >= p of column p+k, reindexed
VectorFin quotient_column(const OpPtr& u, Index p, Index k) {
    VectorFin col = op_column(u, p + k);
    VectorFin out(u->field);
    for (const auto& [i, c] : col.entries())
        if (i >= p) out.set(i - p, c);
    return out;
}

} // namespace

StratPtr torsion_good_strat(const OpPtr& u, std::size_t budget) {
    const FieldSpec& f = u->field;
    OperatorClassTags tags = classify_structure(u);
    if (tags.is_torsion != TriState::Yes)
        throw PreconditionUnverifiable("structure does not certify a torsion module");
    if (tags.deviation_rank_finite != TriState::No)
        throw PreconditionUnverifiable("a dominant eigenvalue is present or not excluded by the structure");

    if (auto lam = structural_index2_lambda(u)) {
        return good_strat_index2(u, *lam);
    }

    auto inv = op_invariance(u);
    if (!inv) throw PreconditionUnverifiable("no structural translation invariance to build a periodic tail from");

    Eliminator elim(f);
    std::vector<Stratum> strata;
    std::vector<std::pair<Index, std::size_t>> checkpoints; // (prefix length, strata count)
    Index scan_window = 4 * std::max<Index>(inv->stride, 1) + 8 + (inv->hi > 0 ? inv->hi : 0) - (inv->lo < 0 ? inv->lo : 0);
    std::size_t chain_cap = 16 + static_cast<std::size_t>(scan_window);
    auto view = companion_view(u);

    for (std::size_t step = 0; step < budget; ++step) {
        // least uncovered basis vector
        Index n = 0;
        while (elim.contains(VectorFin::unit(f, n))) ++n;

        VectorFin r0 = elim.reduce(VectorFin::unit(f, n));
        std::vector<ChainGrowth> batch;
        EigenCheck ec = eigen_check(elim, u, r0);
        if (!ec.eigen) {
            batch.push_back(grow_chain(elim, u, r0, chain_cap));
        } else {
            bool found = false;
            // cheap covering scan: a later basis vector whose module covers e_n
            for (Index m = n + 1; m <= n + scan_window && !found; ++m) {
                VectorFin rm = elim.reduce(VectorFin::unit(f, m));
                if (rm.is_zero()) continue;
                if (eigen_check(elim, u, rm).eigen) continue;
                ChainGrowth g = grow_chain(elim, u, rm, chain_cap);
                Eliminator probe = elim;
                for (const auto& v : g.vecs) probe.insert(v);
                if (probe.contains(VectorFin::unit(f, n))) {
                    batch.push_back(std::move(g));
                    found = true;
                }
            }
            // coprime-annihilator step: a companion block with constant term
            // away from the eigenvalue gives F[t](x0 + y) containing both
            if (!found && view) {
                Scalar lam_core = (ec.lambda - view->mu) / view->factor;
                Index total = 0;
                std::vector<Index> offsets;
                for (const auto& p : view->data->cycle) {
                    offsets.push_back(total);
                    total += p.degree();
                }
                for (Index blk = 0; blk * total <= n + scan_window && !found; ++blk) {
                    for (std::size_t i = 0; i < view->data->cycle.size() && !found; ++i) {
                        if (view->data->cycle[i].eval(lam_core).is_zero()) continue;
                        VectorFin y = VectorFin::unit(f, blk * total + offsets[i]);
                        VectorFin ry = elim.reduce(y);
                        if (ry.is_zero()) continue;
                        VectorFin z = r0 + ry;
                        ChainGrowth g = grow_chain(elim, u, z, chain_cap);
                        Eliminator probe = elim;
                        for (const auto& v : g.vecs) probe.insert(v);
                        if (probe.contains(VectorFin::unit(f, n))) {
                            batch.push_back(std::move(g));
                            found = true;
                        }
                    }
                }
            }
            // locally nilpotent case: y with w^2 y != 0, w^3 y = 0 for w = u - lambda
            if (!found) {
                auto reduced_w = [&](const VectorFin& v) {
                    VectorFin img = elim.reduce(apply(u, v));
                    img.axpy(-ec.lambda, v);
                    return elim.reduce(img);
                };
                for (Index m = 0; m <= n + scan_window && !found; ++m) {
                    VectorFin y = elim.reduce(VectorFin::unit(f, m));
                    if (y.is_zero()) continue;
                    VectorFin w1 = reduced_w(y);
                    VectorFin w2 = reduced_w(w1);
                    VectorFin w3 = reduced_w(w2);
                    if (w2.is_zero() || !w3.is_zero()) continue;
                    Eliminator span_f = elim;
                    span_f.insert(y);
                    span_f.insert(w1);
                    span_f.insert(w2);
                    if (span_f.contains(VectorFin::unit(f, n))) {
                        // x0 in Vect(y, wy, w^2 y): the module of y covers it
                        batch.push_back(grow_chain(elim, u, y, chain_cap));
                    } else {
                        // V0 = F[t](w y + x0), then the class of y on top
                        VectorFin z = w1 + r0;
                        ChainGrowth g1 = grow_chain(elim, u, z, chain_cap);
                        Eliminator after = elim;
                        for (const auto& v : g1.vecs) after.insert(v);
                        ChainGrowth g2 = grow_chain(after, u, after.reduce(y), chain_cap);
                        batch.push_back(std::move(g1));
                        batch.push_back(std::move(g2));
                    }
                    found = true;
                }
            }
            if (!found) throw CapExceeded("no stratum found within the scan window around e_" + std::to_string(n));
        }

        for (const auto& g : batch) {
            if (g.vecs.size() < 2) throw Error("torsion builder produced a layer of dimension < 2");
            for (const auto& v : g.vecs)
                if (!elim.insert(v)) throw Error("torsion builder chain vectors were dependent");
            strata.push_back(Stratum{g.vecs.front(), static_cast<Index>(g.vecs.size())});
        }
        if (!elim.contains(VectorFin::unit(f, n)))
            throw Error("torsion builder failed to cover the enumeration vector");

        // checkpoint: the span is exactly a basis prefix
        Index p = static_cast<Index>(elim.rank());
        if (elim.spans_exact_prefix(p) && p >= inv->start) {
            for (const auto& [p0, c0] : checkpoints) {
                if ((p - p0) % inv->stride != 0) continue;
                Index k0 = std::max<Index>(0, -inv->lo);
                bool equal = true;
                for (Index k = 0; k < k0 && equal; ++k)
                    if (quotient_column(u, p0, k) != quotient_column(u, p, k)) equal = false;
                if (equal) {
                    return std::make_shared<NatStrat>(u, strata, NatStrat::Tail{c0, p - p0});
                }
            }
            checkpoints.emplace_back(p, strata.size());
        }
    }
    throw CapExceeded("torsion stratification budget exhausted before a periodic tail appeared");
}

StratPtr tower_compose(const StratPtr& lower, const StratPtr& upper) {
    PropertyFlags lo = lower->flags();
    if (!lo.PAplus) throw PreconditionUnverifiable("lower stratification must satisfy PA+");
    PropertyFlags up = upper->flags();
    if (!up.good()) throw PreconditionUnverifiable("upper stratification must be good");
    return std::make_shared<TowerStrat>(lower, upper);
}

// ---- finite module split ----

namespace {

MatrixFin mat_minus_scalar(const MatrixFin& m, const Scalar& lam) {
    return m - MatrixFin::identity(m.field(), m.size()).scaled(lam);
}

VectorFin mat_apply(const MatrixFin& m, const VectorFin& v) {
    VectorFin out(m.field());
    for (const auto& [j, c] : v.entries()) out.axpy(c, m.column(j));
    return out;
}

} // namespace

FiniteModuleSplit finite_module_split(const MatrixFin& m, const Scalar& default_mu) {
    const FieldSpec& f = m.field();
    Index n = m.size();
    FiniteModuleSplit out{default_mu, {}, {}};
    if (n == 0) return out;

    Polynomial cp = charpoly(m);
    auto roots = field_roots(cp);

    std::map<std::string, std::vector<VectorFin>> singles_by_eig; // keyed for determinism
    std::vector<std::pair<Scalar, VectorFin>> singles;

    Polynomial rest = cp;
    for (const auto& [lam, mult] : roots) {
        for (int i = 0; i < mult; ++i) rest = rest.divmod(Polynomial::linear_root(lam)).first;
        MatrixFin nl = mat_minus_scalar(m, lam);
        // kernels of powers
        std::vector<std::vector<VectorFin>> kernels; // kernels[j] = ker nl^{j+1}
        MatrixFin power = nl;
        for (int j = 0; j < mult; ++j) {
            kernels.push_back(mat_kernel(power));
            if (j + 1 < mult) power = power * nl;
        }
        int max_len = 1;
        for (int j = 1; j < static_cast<int>(kernels.size()); ++j)
            if (kernels[static_cast<std::size_t>(j)].size() > kernels[static_cast<std::size_t>(j - 1)].size())
                max_len = j + 1;
        std::vector<std::vector<VectorFin>> tops(static_cast<std::size_t>(max_len) + 1);
        for (int len = max_len; len >= 1; --len) {
            Eliminator shadow(f);
            if (len >= 2)
                for (const auto& v : kernels[static_cast<std::size_t>(len - 2)]) shadow.insert(v);
            for (int hl = len + 1; hl <= max_len; ++hl)
                for (const auto& t : tops[static_cast<std::size_t>(hl)]) {
                    VectorFin img = t;
                    for (int s = 0; s < hl - len; ++s) img = mat_apply(nl, img);
                    shadow.insert(img);
                }
            for (const auto& cand : kernels[static_cast<std::size_t>(len - 1)]) {
                if (shadow.insert(cand)) tops[static_cast<std::size_t>(len)].push_back(cand);
            }
        }
        for (int len = max_len; len >= 2; --len)
            for (const auto& t : tops[static_cast<std::size_t>(len)]) out.blocks.push_back(Stratum{t, len});
        for (const auto& t : tops[1]) singles.emplace_back(lam, t);
    }

    if (rest.degree() > 0) {
        // eigenvector-free component: greedy monogenous layers, all of
        // dimension >= 2
        MatrixFin g = eval_poly_mat(rest, m);
        std::vector<VectorFin> comp = mat_kernel(g);
        Eliminator local(f);
        Eliminator comp_span(f);
        for (const auto& v : comp) comp_span.insert(v);
        for (const auto& v : comp) {
            VectorFin r = local.reduce(v);
            if (r.is_zero()) continue;
            std::vector<VectorFin> chain;
            VectorFin cur = r;
            while (!cur.is_zero() && local.insert(cur)) {
                chain.push_back(cur);
                cur = local.reduce(mat_apply(m, cur));
            }
            if (chain.size() < 2) throw Error("eigenvector-free component produced a short layer");
            out.blocks.push_back(Stratum{chain.front(), static_cast<Index>(chain.size())});
        }
    }

    // pair singles across distinct eigenvalues
    std::vector<std::pair<Scalar, std::vector<VectorFin>>> groups;
    for (auto& [lam, v] : singles) {
        bool placed = false;
        for (auto& [gl, vs] : groups)
            if (gl == lam) {
                vs.push_back(v);
                placed = true;
            }
        if (!placed) groups.push_back({lam, {v}});
    }
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (;;) {
        std::vector<std::size_t> live;
        for (std::size_t i = 0; i < groups.size(); ++i)
            if (!groups[i].second.empty()) live.push_back(i);
        if (live.size() < 2) {
            if (live.size() == 1) {
                out.mu = groups[live[0]].first;
                out.eigen = groups[live[0]].second;
            }
            break;
        }
        VectorFin a = groups[live[0]].second.back();
        groups[live[0]].second.pop_back();
        VectorFin b = groups[live[1]].second.back();
        groups[live[1]].second.pop_back();
        out.blocks.push_back(Stratum{a + b, 2});
    }
    return out;
}

// ---- split_dominant ----

SplitDominantResult split_dominant(const OpPtr& u) {
    const FieldSpec& f = u->field;
    OperatorClassTags tags = classify_structure(u);
    if (!tags.dominant_candidate)
        throw PreconditionUnverifiable("structure does not expose a dominant eigenvalue");
    Scalar lambda = *tags.dominant_candidate;
    auto bound = finite_deviation_bound(u, lambda);
    if (!bound) throw PreconditionUnverifiable("finite deviation bound not readable from the structure");

    // columns of w = u - lambda id
    std::vector<std::pair<Index, VectorFin>> w_cols;
    for (Index j = 0; j < *bound; ++j) {
        VectorFin c = op_column(u, j);
        c.axpy(-lambda, VectorFin::unit(f, j));
        if (!c.is_zero()) w_cols.emplace_back(j, c);
    }
    SplitDominantResult out{{}, lambda, VecFamily::cofinite_units(f, {})};
    if (w_cols.empty()) return out; // u = lambda id exactly

    // W' = im(w) + a complement of ker w inside Vect(e_S)
    Eliminator span(f);
    std::vector<VectorFin> basis;
    Eliminator im_elim(f);
    std::vector<Index> s_prime;
    for (const auto& [j, c] : w_cols) {
        if (im_elim.insert(c)) s_prime.push_back(j);
        if (span.insert(c)) basis.push_back(c);
    }
    for (Index j : s_prime) {
        VectorFin e = VectorFin::unit(f, j);
        if (span.insert(e)) basis.push_back(e);
    }

    // matrix of u on W'
    Eliminator coords(f);
    for (const auto& b : basis) coords.insert(b);
    Index nb = static_cast<Index>(basis.size());
    MatrixFin mat(f, nb);
    for (Index i = 0; i < nb; ++i) {
        VectorFin img = apply(u, basis[static_cast<std::size_t>(i)]);
        auto expr = coords.express(img);
        if (!expr) throw Error("W' is not invariant under u");
        for (const auto& [tag, c] : *expr) mat.set(static_cast<Index>(tag), i, c);
    }

    FiniteModuleSplit fm = finite_module_split(mat, lambda);
    auto to_ambient = [&](const VectorFin& coords_vec) {
        VectorFin v(f);
        for (const auto& [i, c] : coords_vec.entries()) v.axpy(c, basis[static_cast<std::size_t>(i)]);
        return v;
    };
    for (const auto& blk : fm.blocks) out.blocks.push_back(Stratum{to_ambient(blk.gen), blk.dim});

    // complement H: kernel vectors spanning the rest of V
    std::set<Index> s_cols;
    for (const auto& [j, c] : w_cols) s_cols.insert(j);
    Index cutoff = *bound;
    for (const auto& b : basis) cutoff = std::max(cutoff, b.max_index() + 1);

    Eliminator total(f);
    for (const auto& b : basis) total.insert(b);
    std::vector<VectorFin> h_extras;
    std::set<Index> excluded;
    // kernel combinations supported on the patched columns
    {
        // kernel of w restricted to Vect(e_j : j in S): via expressions over inserted columns
        Eliminator cols_elim(f);
        std::vector<Index> inserted_cols;
        for (const auto& [j, c] : w_cols) {
            if (cols_elim.insert(c))
                inserted_cols.push_back(j);
            else {
                auto expr = cols_elim.express(c);
                VectorFin k = VectorFin::unit(f, j);
                for (const auto& [tag, coef] : *expr) k.axpy(-coef, VectorFin::unit(f, inserted_cols[tag]));
                if (total.insert(k)) h_extras.push_back(k);
            }
        }
    }
    std::vector<VectorFin> eigen_ambient;
    for (const auto& e : fm.eigen) eigen_ambient.push_back(to_ambient(e));

    for (Index j = 0; j < cutoff; ++j) {
        if (s_cols.count(j)) {
            excluded.insert(j);
            continue;
        }
        VectorFin e = VectorFin::unit(f, j);
        if (!total.insert(e)) excluded.insert(j);
    }

    if (fm.mu == lambda || fm.eigen.empty()) {
        for (const auto& e : eigen_ambient) h_extras.push_back(e);
        out.h_basis = VecFamily::cofinite_units(f, std::move(excluded), std::move(h_extras));
        return out;
    }
    // mu != lambda: re-pair the eigen part with fresh kernel units
    std::size_t need = eigen_ambient.size();
    std::size_t used = 0;
    for (Index j = cutoff; used < need && j < cutoff + static_cast<Index>(need); ++j) {
        excluded.insert(j);
        VectorFin pair_gen = eigen_ambient[used] + VectorFin::unit(f, j);
        out.blocks.push_back(Stratum{pair_gen, 2});
        ++used;
    }
    out.h_basis = VecFamily::cofinite_units(f, std::move(excluded), std::move(h_extras));
    return out;
}

} // namespace qsum
