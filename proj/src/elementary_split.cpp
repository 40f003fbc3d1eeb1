#include "qsum/elementary_split.hpp"

#include "qsum/errors.hpp"

namespace qsum {

namespace {

OpPtr banded_from(const FieldSpec& f, Index period, std::vector<std::pair<Index, std::vector<long long>>> bands) {
    PeriodicBands pb;
    pb.period = period;
    for (auto& [off, pat] : bands) {
        BandEntry be;
        be.offset = off;
        for (long long v : pat) be.pattern.push_back(Scalar::of_int(f, v));
        pb.bands.push_back(std::move(be));
    }
    return make_banded(f, pb);
}

// q(T) for an abstract operator: T^2 - a T
OpPtr quad_of(const OpPtr& t, const Scalar& a) {
    OpPtr sq = op_compose(t, t);
    if (a.is_zero()) return sq;
    return op_sub(sq, op_scale(a, t));
}

} // namespace

TwoSplit split_shift_squarezero(const FieldSpec& f) {
    OpPtr a = banded_from(f, 2, {{1, {1, 0}}});
    OpPtr b = banded_from(f, 2, {{1, {0, 1}}});
    return {a, b};
}

TwoSplit split_shift_idempotent_char2(const FieldSpec& f) {
    if (f.characteristic != 2) throw WrongCharacteristic("characteristic 2 required");
    OpPtr a = banded_from(f, 2, {{1, {1, 0}}, {0, {0, 1}}});
    OpPtr b = banded_from(f, 2, {{1, {0, 1}}, {0, {0, 1}}});
    return {a, b};
}

bool split_pair_has_closed_form(const FieldSpec& f, const Scalar& a1, const Scalar& a2) {
    if (a1.is_zero() && a2.is_zero()) return true;
    if (f.characteristic == 2) return a1 == a2 && (a1.is_zero() || a1.is_one());
    return a1 == a2 || a1 == -a2;
}

namespace {

// abstract chain-index rule search: find banded A with q1(A) = 0 and
// q2(S - A) = 0, S the shift
std::optional<ChainBandedFamily::Rule> banded_ansatz_search(const FieldSpec& f, const Scalar& a1, const Scalar& a2,
                                                            std::size_t budget) {
    OpPtr shift = make_shift(f);
    std::vector<Scalar> candidates;
    auto push_unique = [&](const Scalar& s) {
        for (const auto& c : candidates)
            if (c == s) return;
        candidates.push_back(s);
    };
    if (f.kind == FieldKind::PrimeField && f.characteristic <= 5) {
        for (std::int64_t v = 0; v < f.characteristic; ++v) push_unique(Scalar::of_int(f, v));
    } else {
        push_unique(Scalar::zero(f));
        push_unique(Scalar::one(f));
        push_unique(-Scalar::one(f));
        push_unique(a1);
        push_unique(a2);
        push_unique(-a1);
        push_unique(-a2);
    }
    std::size_t tried = 0;
    for (Index period = 1; period <= 4; ++period) {
        std::vector<std::size_t> diag_idx(static_cast<std::size_t>(period), 0);
        std::vector<Scalar> diag_roots = {Scalar::zero(f), a1};
        for (;;) {
            std::vector<std::size_t> band_idx(static_cast<std::size_t>(period), 0);
            for (;;) {
                if (++tried > budget) return std::nullopt;
                PeriodicBands pb;
                pb.period = period;
                BandEntry diag{0, {}}, super{1, {}};
                for (Index r = 0; r < period; ++r) {
                    diag.pattern.push_back(diag_roots[diag_idx[static_cast<std::size_t>(r)]]);
                    super.pattern.push_back(candidates[band_idx[static_cast<std::size_t>(r)]]);
                }
                pb.bands = {diag, super};
                OpPtr cand = make_banded(f, pb);
                auto z1 = op_is_zero_structural(quad_of(cand, a1));
                if (z1 && *z1) {
                    OpPtr other = op_sub(shift, cand);
                    auto z2 = op_is_zero_structural(quad_of(other, a2));
                    if (z2 && *z2) {
                        ChainBandedFamily::Rule rule;
                        rule.period = period;
                        for (Index r = 0; r < period; ++r) {
                            std::vector<std::pair<Index, Scalar>> moves;
                            const Scalar& dv = diag.pattern[static_cast<std::size_t>(r)];
                            const Scalar& sv = super.pattern[static_cast<std::size_t>(r)];
                            if (!dv.is_zero()) moves.emplace_back(0, dv);
                            if (!sv.is_zero()) moves.emplace_back(1, sv);
                            rule.images.push_back(std::move(moves));
                        }
                        return rule;
                    }
                }
                // advance band indices
                std::size_t pos = 0;
                while (pos < band_idx.size()) {
                    if (++band_idx[pos] < candidates.size()) break;
                    band_idx[pos] = 0;
                    ++pos;
                }
                if (pos == band_idx.size()) break;
            }
            std::size_t pos = 0;
            while (pos < diag_idx.size()) {
                if (++diag_idx[pos] < diag_roots.size()) break;
                diag_idx[pos] = 0;
                ++pos;
            }
            if (pos == diag_idx.size()) break;
        }
    }
    return std::nullopt;
}

} // namespace

TwoSplit split_elementary(const OpPtr& u, const VecFamily& gens, const QuadraticTarget& p1,
                          const QuadraticTarget& p2, Index verify_prefix, std::size_t search_budget) {
    const FieldSpec& f = u->field;
    require_same_field(f, p1.field());
    require_same_field(f, p2.field());
    Scalar c = p1.x + p2.x;
    Scalar a1 = p1.gap(), a2 = p2.gap();
    Scalar one = Scalar::one(f);

    // A' on the chains of u - c id, carrying q1 = t^2 - a1 t; then
    // A = A' + x1 id and B = u - A.
    OpPtr a_chain;
    if (a1.is_zero() && a2.is_zero()) {
        ChainBandedFamily::Rule rule;
        rule.period = 2;
        rule.images = {{{1, one}}, {}};
        a_chain = make_mapped(std::make_shared<ChainBandedFamily>(u, c, gens, rule));
    } else if (f.characteristic == 2 && a1 == a2 && a1.is_one()) {
        ChainBandedFamily::Rule rule;
        rule.period = 2;
        rule.images = {{{1, one}}, {{0, one}}};
        a_chain = make_mapped(std::make_shared<ChainBandedFamily>(u, c, gens, rule));
    } else if (f.characteristic != 2 && (a1 == a2 || a1 == -a2)) {
        // (t/2 + l)(f + f(sigma - t)) with sigma = a1 + a2, l = (a1 - a2)/4
        Scalar half = Scalar::of_int(f, 2).inverse();
        Scalar sigma = a1 + a2;
        Scalar l = (a1 - a2) * Scalar::of_int(f, 4).inverse();
        a_chain = make_mapped(std::make_shared<ChainReflectFamily>(u, c, gens, half, l, half, l, sigma));
    } else {
        auto rule = banded_ansatz_search(f, a1, a2, search_budget);
        if (!rule)
            throw SearchFailed("no banded-periodic ansatz splits the pair (t^2-" + a1.str() + "t, t^2-" + a2.str() +
                               "t) within the budget");
        a_chain = make_mapped(std::make_shared<ChainBandedFamily>(u, c, gens, *rule));
    }

    OpPtr a = p1.x.is_zero() ? a_chain : op_add(a_chain, make_scalar_id(p1.x));
    OpPtr b = op_sub(u, a);

    // never return an unverified pair
    for (Index n = 0; n < verify_prefix; ++n) {
        VectorFin e = VectorFin::unit(f, n);
        if (!eval_poly_vec(p1.monic, a, e).is_zero())
            throw Error("elementary split failed p1 verification at column " + std::to_string(n));
        if (!eval_poly_vec(p2.monic, b, e).is_zero())
            throw Error("elementary split failed p2 verification at column " + std::to_string(n));
    }
    return {a, b};
}

} // namespace qsum
