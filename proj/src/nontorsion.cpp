#include "qsum/nontorsion.hpp"

#include <algorithm>

#include "qsum/elim.hpp"
#include "qsum/errors.hpp"

namespace qsum {

namespace {

// Columns n >= start are single-entry: u(e_n) = c_n e_{n+m} with c_n != 0.
// Together with translation invariance this pins the whole tail, so the
// chains of e_start..e_{start+m-1} triangularly span Vect(e_n : n >= start).
struct ShiftTail {
    Index start;
    Index m;
};

std::optional<ShiftTail> shift_tail_view(const OpPtr& u, const std::vector<Index>& gens) {
    if (gens.empty()) return std::nullopt;
    auto inv = op_invariance(u);
    if (!inv) return std::nullopt;
    Index start = *std::min_element(gens.begin(), gens.end());
    Index m = static_cast<Index>(gens.size());
    for (Index j = 0; j < m; ++j)
        if (std::find(gens.begin(), gens.end(), start + j) == gens.end()) return std::nullopt;
    if (start < inv->start) return std::nullopt;
    Index window = inv->stride + m + 4;
    for (Index n = start; n < start + window; ++n) {
        VectorFin col = op_column(u, n);
        if (col.support_size() != 1) return std::nullopt;
        if (col.min_index() != n + m) return std::nullopt;
    }
    return ShiftTail{start, m};
}

VectorFin w_apply(const OpPtr& u, const Scalar& lambda, const VectorFin& v) {
    VectorFin img = apply(u, v);
    if (!lambda.is_zero()) img.axpy(-lambda, v);
    return img;
}

// Expansion helper over the w-chains of a generator list plus extra explicit
// vectors; pulls chain vectors on demand.
class ChainExpander {
  public:
    ChainExpander(OpPtr u, Scalar lambda, std::vector<VectorFin> gens)
        : u_(std::move(u)), lambda_(std::move(lambda)), gens_(std::move(gens)), elim_(u_->field) {}

    // coordinates over (gen index, power); throws CapExceeded when the
    // expansion does not close
    std::map<std::pair<std::size_t, std::size_t>, Scalar> express(const VectorFin& v, std::size_t cap = 512) {
        for (std::size_t pulls = 0;; ++pulls) {
            auto expr = elim_.express(v);
            if (expr) {
                std::map<std::pair<std::size_t, std::size_t>, Scalar> out;
                for (const auto& [tag, c] : *expr) out.emplace(tag_pos_[tag], c);
                return out;
            }
            if (pulls >= cap) throw CapExceeded("chain expansion budget exhausted");
            pull_next();
        }
    }

  private:
    void pull_next() {
        // antidiagonal over (gen, power)
        for (;;) {
            if (round_pos_ > round_) {
                ++round_;
                round_pos_ = 0;
            }
            std::size_t c = round_pos_++;
            std::size_t k = round_ - c;
            if (c >= gens_.size()) continue;
            const VectorFin& vec = chain(c, k);
            if (elim_.insert(vec)) {
                tag_pos_[elim_.inserted() - 1] = {c, k};
                return;
            }
            throw Error("free-part chains are dependent");
        }
    }

    const VectorFin& chain(std::size_t c, std::size_t k) {
        if (chains_.size() <= c) chains_.resize(c + 1);
        auto& ch = chains_[c];
        if (ch.empty()) ch.push_back(gens_[c]);
        while (ch.size() <= k) ch.push_back(w_apply(u_, lambda_, ch.back()));
        return ch[k];
    }

    OpPtr u_;
    Scalar lambda_;
    std::vector<VectorFin> gens_;
    Eliminator elim_;
    std::vector<std::vector<VectorFin>> chains_;
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> tag_pos_;
    std::size_t round_ = 0, round_pos_ = 0;
};

} // namespace

std::vector<VectorFin> quasi_maximal_free(const OpPtr& u) {
    OperatorClassTags tags = classify_structure(u);
    if (tags.free_part_generators.empty())
        throw PreconditionUnverifiable("structure exposes no free part");
    std::vector<VectorFin> gens;
    for (Index g : tags.free_part_generators) gens.push_back(VectorFin::unit(u->field, g));
    return gens;
}

OpPtr sewing(const OpPtr& u, const VectorFin& x, const VecFamily& v2, const Scalar& lambda, const Scalar& a) {
    return make_mapped(std::make_shared<SewingFamily>(u, lambda, a, x, v2));
}

NonTorsionSplit nontorsion_decompose(const OpPtr& u) {
    const FieldSpec& f = u->field;
    OperatorClassTags tags = classify_structure(u);
    if (tags.is_torsion != TriState::No)
        throw PreconditionUnverifiable("structure does not certify a non-torsion module");
    if (tags.deviation_rank_finite != TriState::No)
        throw PreconditionUnverifiable("a dominant eigenvalue is present or not excluded by the structure");
    if (tags.free_part_generators.empty())
        throw PreconditionUnverifiable("structure exposes no free part");

    // direct sum with a scalar block: W = F = embedded left copy, H = right copy
    if (u->kind == OpKind::DirectSum) {
        const auto& d = std::get<DirectSumData>(u->data);
        OperatorClassTags right = classify_structure(d.right);
        OperatorClassTags left = classify_structure(d.left);
        if (right.dominant_candidate && finite_deviation_bound(d.right, *right.dominant_candidate) &&
            *finite_deviation_bound(d.right, *right.dominant_candidate) == 0) {
            auto lt = shift_tail_view(d.left, left.free_part_generators);
            if (lt && lt->start == 0) {
                NonTorsionSplit out{*right.dominant_candidate, {}, {}, VecFamily::empty(f)};
                for (Index j = 0; j < lt->m; ++j) out.f_generators.push_back(VectorFin::unit(f, 2 * j));
                out.h_basis =
                    VecFamily::with_tails(f, {}, {VecFamily::ArithTail{VectorFin::unit(f, 1), 2}});
                return out;
            }
        }
        throw PreconditionUnverifiable("direct-sum shape not supported: right side is not a scalar block");
    }

    auto st = shift_tail_view(u, tags.free_part_generators);
    if (!st) throw PreconditionUnverifiable("free part is not a shift-like tail");
    Index N = st->start, m = st->m;

    if (N == 0) {
        // V is already free on the tail generators
        NonTorsionSplit out{Scalar::zero(f), {}, {}, VecFamily::explicit_list(f, {})};
        for (Index j = 0; j < m; ++j) out.f_generators.push_back(VectorFin::unit(f, j));
        return out;
    }

    // quotient module on the prefix classes e_0..e_{N-1}
    MatrixFin q(f, N);
    for (Index j = 0; j < N; ++j) {
        VectorFin col = op_column(u, j);
        for (const auto& [i, c] : col.entries())
            if (i < N) q.set(i, j, c);
    }
    FiniteModuleSplit fm = finite_module_split(q, Scalar::zero(f));
    Scalar lambda = fm.mu;

    // lift the eigen part and correct it so that w(x) lands in F'_0
    std::vector<VectorFin> f0_units;
    for (Index j = 0; j < m; ++j) f0_units.push_back(VectorFin::unit(f, N + j));
    std::vector<VectorFin> tail_gens = f0_units;
    ChainExpander expander(u, lambda, tail_gens);

    std::vector<VectorFin> lifts;
    for (const auto& e : fm.eigen) {
        VectorFin x(f);
        for (const auto& [i, c] : e.entries()) x.set(i, c); // quotient coords are prefix indices
        VectorFin wx = w_apply(u, lambda, x);
        auto coords = expander.express(wx);
        // subtract xi = sum over powers k >= 1 of c * w^{k-1}(e_j)
        for (const auto& [pos, c] : coords) {
            auto [gen, k] = pos;
            if (k == 0) continue;
            // build w^{k-1}(e_gen)
            VectorFin v = f0_units[gen];
            for (std::size_t s = 0; s + 1 < k; ++s) v = w_apply(u, lambda, v);
            x.axpy(-c, v);
        }
        lifts.push_back(std::move(x));
    }

    // h : lifts -> F'_0, kernel gives H, a complement gives F_1
    Eliminator img_elim(f);
    std::vector<VectorFin> f1_gens, f1_images, h_vectors;
    std::vector<VectorFin> pivots_lifts;
    for (auto x : lifts) {
        VectorFin wx = w_apply(u, lambda, x);
        VectorFin residual = wx;
        // reduce against recorded images, mirroring the operations on x
        for (;;) {
            auto expr = img_elim.express(residual);
            if (expr) {
                for (const auto& [tag, c] : *expr) x.axpy(-c, pivots_lifts[tag]);
                residual = w_apply(u, lambda, x);
                break;
            }
            break;
        }
        if (residual.is_zero()) {
            h_vectors.push_back(x);
        } else {
            img_elim.insert(residual);
            pivots_lifts.push_back(x);
            f1_gens.push_back(x);
            f1_images.push_back(residual);
        }
    }

    // F_0: units of F'_0 completing F'_1
    Eliminator comp(f);
    for (const auto& img : f1_images) comp.insert(img);
    std::vector<VectorFin> f0_gens;
    for (const auto& unit : f0_units)
        if (comp.insert(unit)) f0_gens.push_back(unit);

    NonTorsionSplit out{lambda, {}, {}, VecFamily::explicit_list(f, h_vectors)};
    for (auto& g : f0_gens) out.f_generators.push_back(g);
    for (auto& g : f1_gens) out.f_generators.push_back(g);

    // lifts of the PA+ blocks of the quotient
    for (const auto& blk : fm.blocks) {
        VectorFin lift(f);
        for (const auto& [i, c] : blk.gen.entries()) lift.set(i, c);
        out.w_extra.push_back(Stratum{lift, blk.dim});
    }
    return out;
}

AElementary assemble_a_elementary(const OpPtr& u, const NonTorsionSplit& split, const Scalar& a) {
    const FieldSpec& f = u->field;
    const Scalar& lambda = split.lambda;
    if (split.f_generators.empty()) throw PreconditionUnverifiable("empty free part");
    VectorFin x = split.f_generators[0];
    std::vector<VectorFin> f_rest(split.f_generators.begin() + 1, split.f_generators.end());

    auto zero_chains_part = [&](std::vector<FamilyPtr>& parts, std::vector<std::optional<std::size_t>>& sizes) {
        if (!f_rest.empty()) {
            parts.push_back(std::make_shared<ZeroChainsFamily>(u, VecFamily::explicit_list(f, f_rest)));
            sizes.push_back(std::nullopt);
        }
    };

    if (split.w_extra.empty()) {
        std::vector<FamilyPtr> parts;
        std::vector<std::optional<std::size_t>> sizes;
        parts.push_back(std::make_shared<SewingFamily>(u, lambda, a, x, split.h_basis));
        sizes.push_back(std::nullopt);
        zero_chains_part(parts, sizes);
        OpPtr v = parts.size() == 1 ? make_mapped(parts[0])
                                    : make_mapped(std::make_shared<CompositeFamily>(f, parts, sizes));
        std::vector<VectorFin> gens{x};
        for (auto& g : f_rest) gens.push_back(g);
        return AElementary{v, VecFamily::explicit_list(f, gens)};
    }

    // general case: thread the finite strata into the chain of x
    const auto& strata = split.w_extra;
    Index big_m = 0;
    for (const auto& s : strata) big_m += s.dim;

    // B-list: full chains of every stratum, one vector short on the last
    std::vector<VectorFin> b_list;
    std::vector<std::optional<VectorFin>> b_image; // nullopt = 0
    std::vector<std::vector<VectorFin>> chains;
    for (std::size_t i = 0; i < strata.size(); ++i) {
        std::vector<VectorFin> chain;
        chain.push_back(strata[i].gen);
        for (Index k = 1; k < strata[i].dim; ++k) chain.push_back(w_apply(u, lambda, chain.back()));
        chains.push_back(chain);
    }
    for (std::size_t i = 0; i < strata.size(); ++i) {
        std::size_t upto = chains[i].size() - (i + 1 == strata.size() ? 1 : 0);
        for (std::size_t k = 0; k < upto; ++k) {
            b_list.push_back(chains[i][k]);
            bool is_end = (k + 1 == chains[i].size()) && (i + 1 < strata.size());
            if (is_end) {
                VectorFin img = chains[i][k].scaled(a);
                img.axpy(-Scalar::one(f), strata[i + 1].gen);
                b_image.push_back(img);
            } else {
                b_image.push_back(std::nullopt);
            }
        }
    }

    // polynomials p_i: expansion of w^{n_i}(x_i) over strata chains, the
    // chain of x and the remaining free chains
    std::size_t max_deg = 0;
    {
        std::vector<VectorFin> gens;
        gens.push_back(x);
        for (const auto& g : f_rest) gens.push_back(g);
        for (std::size_t i = 0; i < strata.size(); ++i) {
            std::vector<VectorFin> basis_gens = gens;
            for (std::size_t jj = 0; jj <= i; ++jj) basis_gens.push_back(strata[jj].gen);
            ChainExpander exp(u, lambda, basis_gens);
            VectorFin top = w_apply(u, lambda, chains[i].back());
            auto coords = exp.express(top);
            for (const auto& [pos, c] : coords) {
                auto [gen, k] = pos;
                if (gen == 0 && !c.is_zero()) max_deg = std::max(max_deg, k);
            }
        }
    }
    Index d = big_m + static_cast<Index>(max_deg);

    // x-chain prefix mapped to zero
    std::vector<VectorFin> xchain;
    xchain.push_back(x);
    for (Index k = 1; k < d; ++k) xchain.push_back(w_apply(u, lambda, xchain.back()));

    // f on the current explicit basis (B-list, x-chain, free chains = 0)
    auto apply_f = [&](const VectorFin& v, Eliminator& basis_elim, const std::vector<std::optional<VectorFin>>& images)
        -> VectorFin {
        auto expr = basis_elim.express(v);
        if (!expr) throw Error("assembly vector escapes the bookkeeping space");
        VectorFin out(f);
        for (const auto& [tag, c] : *expr)
            if (images[tag]) out.axpy(c, *images[tag]);
        return out;
    };

    // basis for evaluating f during the y-chain construction: B-list with its
    // images, the x-chain prefix (0), and the free chains (0), pulled deep
    // enough for every expansion we need
    Eliminator feval(f);
    std::vector<std::optional<VectorFin>> feval_images;
    for (std::size_t i = 0; i < b_list.size(); ++i) {
        if (!feval.insert(b_list[i])) throw Error("B-list vectors are dependent");
        feval_images.push_back(b_image[i]);
    }
    for (const auto& xc : xchain) {
        if (!feval.insert(xc)) throw Error("x-chain meets the strata span");
        feval_images.push_back(std::nullopt);
    }
    {
        // pull free chains far enough to close every expansion below; depth
        // d + big_m + 8 is ample for the bookkeeping space
        std::size_t depth = static_cast<std::size_t>(d + big_m + 8);
        for (const auto& g : f_rest) {
            VectorFin cur = g;
            for (std::size_t k = 0; k < depth; ++k) {
                if (feval.insert(cur)) feval_images.push_back(std::nullopt);
                cur = w_apply(u, lambda, cur);
            }
        }
    }

    // y-chain
    std::vector<VectorFin> ys;
    ys.push_back(strata[0].gen);
    for (Index k = 1; k < big_m; ++k) {
        const VectorFin& prev = ys.back();
        VectorFin next = w_apply(u, lambda, prev);
        next.axpy(-Scalar::one(f), apply_f(prev, feval, feval_images));
        ys.push_back(next);
    }
    VectorFin y_m = ys.back();

    // w(y_M) = z + z' with z in F_{d-1}[t]x (+) F', z' in Vect(y_1..y_M)
    VectorFin wy = w_apply(u, lambda, y_m);
    Eliminator zsplit(f);
    std::vector<int> zkind; // 0 = y-part, 1 = z-part (x-chain/free), 2 = overflow
    std::vector<VectorFin> zvecs;
    for (const auto& y : ys) {
        if (zsplit.insert(y)) {
            zkind.push_back(0);
            zvecs.push_back(y);
        }
    }
    for (const auto& xc : xchain) {
        if (zsplit.insert(xc)) {
            zkind.push_back(1);
            zvecs.push_back(xc);
        }
    }
    {
        std::size_t depth = static_cast<std::size_t>(d + big_m + 8);
        for (const auto& g : f_rest) {
            VectorFin cur = g;
            for (std::size_t k = 0; k < depth; ++k) {
                if (zsplit.insert(cur)) {
                    zkind.push_back(1);
                    zvecs.push_back(cur);
                }
                cur = w_apply(u, lambda, cur);
            }
        }
    }
    auto zexpr = zsplit.express(wy);
    if (!zexpr) throw Error("w(y_M) escapes the bookkeeping space");
    VectorFin z(f);
    for (const auto& [tag, c] : *zexpr) {
        if (zkind[tag] == 1) z.axpy(c, zvecs[tag]);
    }

    // f(y_M) = a y_M + z - x
    VectorFin fy = y_m.scaled(a);
    fy.axpy(Scalar::one(f), z);
    fy.axpy(-Scalar::one(f), x);

    // assemble the operator: explicit pairs + zero free chains + sewing on
    // F[t] w^d(x) (+) H
    std::vector<std::pair<VectorFin, VectorFin>> explicit_pairs;
    for (std::size_t i = 0; i < b_list.size(); ++i)
        explicit_pairs.emplace_back(b_list[i], b_image[i] ? *b_image[i] : VectorFin(f));
    explicit_pairs.emplace_back(y_m, fy);
    for (const auto& xc : xchain) explicit_pairs.emplace_back(xc, VectorFin(f));

    VectorFin xd = xchain.empty() ? x : w_apply(u, lambda, xchain.back());

    std::vector<FamilyPtr> parts;
    std::vector<std::optional<std::size_t>> sizes;
    parts.push_back(std::make_shared<ExplicitPairsFamily>(f, explicit_pairs));
    sizes.push_back(explicit_pairs.size());
    parts.push_back(std::make_shared<SewingFamily>(u, lambda, a, xd, split.h_basis));
    sizes.push_back(std::nullopt);
    zero_chains_part(parts, sizes);

    OpPtr v = make_mapped(std::make_shared<CompositeFamily>(f, parts, sizes));
    std::vector<VectorFin> gens{ys.front()};
    for (auto& g : f_rest) gens.push_back(g);
    return AElementary{v, VecFamily::explicit_list(f, gens)};
}

} // namespace qsum
