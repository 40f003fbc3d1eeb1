#include "qsum/families.hpp"

#include "qsum/errors.hpp"

namespace qsum {

// ---- VecFamily ----

VecFamily VecFamily::explicit_list(const FieldSpec& f, std::vector<VectorFin> vecs) {
    VecFamily fam(f);
    fam.head_ = std::move(vecs);
    for (const auto& v : fam.head_) require_same_field(f, v.field());
    return fam;
}

VecFamily VecFamily::with_tails(const FieldSpec& f, std::vector<VectorFin> head, std::vector<ArithTail> tails) {
    VecFamily fam(f);
    fam.head_ = std::move(head);
    fam.tails_ = std::move(tails);
    for (const auto& t : fam.tails_) {
        require_same_field(f, t.pattern.field());
        if (t.stride <= 0) throw Error("arithmetic tail stride must be positive");
    }
    return fam;
}

VecFamily VecFamily::cofinite_units(const FieldSpec& f, std::set<Index> excluded, std::vector<VectorFin> extras) {
    VecFamily fam(f);
    fam.head_ = std::move(extras);
    fam.cofinite_ = Cofinite{std::move(excluded)};
    return fam;
}

VectorFin VecFamily::at(std::size_t i) const {
    if (i < head_.size()) return head_[i];
    std::size_t j = i - head_.size();
    if (cofinite_) {
        // j-th standard unit vector not excluded, ascending
        Index n = 0;
        std::size_t seen = 0;
        for (;;) {
            if (!cofinite_->excluded.count(n)) {
                if (seen == j) return VectorFin::unit(field_, n);
                ++seen;
            }
            ++n;
        }
    }
    if (tails_.empty()) throw Error("finite vector family exhausted at index " + std::to_string(i));
    std::size_t t = j % tails_.size();
    std::size_t m = j / tails_.size();
    return tails_[t].pattern.translated(static_cast<Index>(m) * tails_[t].stride);
}

// ---- ExplicitPairsFamily ----

std::pair<VectorFin, VectorFin> ExplicitPairsFamily::at(std::size_t i) const {
    if (i >= pairs_.size()) throw Error("explicit pair family exhausted at index " + std::to_string(i));
    return pairs_[i];
}

// ---- ChainCache ----

const VectorFin& ChainCache::chain(std::size_t c, std::size_t k) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (chains_.size() <= c) chains_.resize(c + 1);
    auto& chain = chains_[c];
    if (chain.empty()) chain.push_back(gens_.at(c));
    while (chain.size() <= k) {
        VectorFin next = apply(carrier_, chain.back());
        if (!shift_.is_zero()) next.axpy(-shift_, chain.back());
        chain.push_back(std::move(next));
    }
    return chain[k];
}

// ---- dovetail helper ----

namespace {

// Antidiagonal enumeration of N x N (chain c, position k): round r emits
// (0, r), (1, r-1), ..., (r, 0). With finitely many chains, rows beyond the
// count are skipped.
std::pair<std::size_t, std::size_t> dovetail(std::size_t i, std::optional<std::size_t> chain_count) {
    if (chain_count && *chain_count == 1) return {0, i};
    if (chain_count) {
        std::size_t C = *chain_count;
        if (C == 0) throw Error("dovetail over an empty family");
        std::size_t r = 0, consumed = 0;
        for (;;) {
            std::size_t row_len = std::min(r + 1, C);
            if (i < consumed + row_len) {
                std::size_t c = i - consumed;
                return {c, r - c};
            }
            consumed += row_len;
            ++r;
        }
    }
    // full N x N antidiagonals
    std::size_t r = 0, consumed = 0;
    while (i >= consumed + (r + 1)) {
        consumed += r + 1;
        ++r;
    }
    std::size_t c = i - consumed;
    return {c, r - c};
}

std::optional<std::size_t> family_count(const VecFamily& fam) {
    if (fam.finite()) return fam.finite_size();
    return std::nullopt;
}

} // namespace

// ---- ZeroChainsFamily ----

std::pair<VectorFin, VectorFin> ZeroChainsFamily::at(std::size_t i) const {
    auto [c, k] = dovetail(i, family_count(cache_.gens()));
    return {cache_.chain(c, k), VectorFin(field_)};
}

// ---- ChainBandedFamily ----

std::pair<VectorFin, VectorFin> ChainBandedFamily::at(std::size_t i) const {
    auto [c, k] = dovetail(i, family_count(cache_.gens()));
    VectorFin img(field_);
    const auto& moves = rule_.images[k % static_cast<std::size_t>(rule_.period)];
    for (const auto& [off, coeff] : moves) {
        if (coeff.is_zero()) continue;
        img.axpy(coeff, cache_.chain(c, k + static_cast<std::size_t>(off)));
    }
    return {cache_.chain(c, k), img};
}

// ---- ChainReflectFamily ----

std::pair<VectorFin, VectorFin> ChainReflectFamily::at(std::size_t i) const {
    auto [c, k] = dovetail(i, family_count(cache_.gens()));
    // q(t) = (alpha t + lambda) t^k + (beta t + mu) (sigma - t)^k
    const FieldSpec& f = field_;
    Polynomial tk(f, [&] {
        std::vector<Scalar> cs(k + 1, Scalar::zero(f));
        cs[k] = Scalar::one(f);
        return cs;
    }());
    Polynomial refl(f, {sigma_, -Scalar::one(f)});
    Polynomial reflk(f, {Scalar::one(f)});
    for (std::size_t j = 0; j < k; ++j) reflk = reflk * refl;
    Polynomial tpoly(f, {Scalar::zero(f), Scalar::one(f)});
    Polynomial q = (tpoly.scaled(alpha_) + Polynomial::constant(lambda_)) * tk +
                   (tpoly.scaled(beta_) + Polynomial::constant(mu_)) * reflk;
    VectorFin img(f);
    for (int j = 0; j <= q.degree(); ++j) {
        Scalar cj = q.coeff(j);
        if (!cj.is_zero()) img.axpy(cj, cache_.chain(c, static_cast<std::size_t>(j)));
    }
    return {cache_.chain(c, k), img};
}

// ---- SewingFamily ----

std::pair<VectorFin, VectorFin> SewingFamily::entry_for(bool is_chain, std::size_t idx) const {
    const FieldSpec& f = field_;
    bool a_zero = a_.is_zero();
    bool finite = v2_.finite();
    std::size_t p = finite ? v2_.finite_size() : 0;
    if (is_chain) {
        std::size_t k = idx;
        const VectorFin& basis = chain(k);
        if (finite && k >= 3 * p) return {basis, VectorFin(f)};
        std::size_t n = k / 3;
        switch (k % 3) {
            case 0: {
                VectorFin img = chain(k + 1);
                img.axpy(-Scalar::one(f), v2_.at(n));
                return {basis, img};
            }
            case 1: {
                if (a_zero) {
                    VectorFin img = chain(k).scaled(-Scalar::one(f));
                    img.axpy(Scalar::one(f), v2_.at(n));
                    return {basis, img};
                }
                return {basis, VectorFin(f)};
            }
            default:
                return {basis, VectorFin(f)};
        }
    }
    std::size_t n = idx;
    VectorFin fn = v2_.at(n);
    VectorFin img(f);
    if (a_zero) {
        img.axpy(-Scalar::one(f), chain(3 * n + 1));
        img.axpy(Scalar::one(f), fn);
    } else {
        img.axpy(-a_, chain(3 * n + 1));
        img.axpy(a_, fn);
    }
    return {fn, img};
}

std::pair<VectorFin, VectorFin> SewingFamily::at(std::size_t i) const {
    if (v2_.finite()) {
        std::size_t p = v2_.finite_size();
        if (i < 2 * p) {
            if (i % 2 == 0) return entry_for(true, i / 2);
            return entry_for(false, (i - 1) / 2);
        }
        return entry_for(true, i - p);
    }
    if (i % 2 == 0) return entry_for(true, i / 2);
    return entry_for(false, (i - 1) / 2);
}

// ---- PairTiledFamily ----

std::pair<VectorFin, VectorFin> PairTiledFamily::at(std::size_t i) const {
    if (block_.size() != 2) throw Error("pair tiling expects a 2x2 block");
    std::size_t pair_idx = i / 2;
    VectorFin lo = units_.at(2 * pair_idx);
    VectorFin hi = units_.at(2 * pair_idx + 1);
    if (i % 2 == 0) {
        VectorFin img = lo.scaled(block_.at(0, 0));
        img.axpy(block_.at(1, 0), hi);
        return {lo, img};
    }
    VectorFin img = lo.scaled(block_.at(0, 1));
    img.axpy(block_.at(1, 1), hi);
    return {hi, img};
}

// ---- CompositeFamily ----

std::pair<VectorFin, VectorFin> CompositeFamily::at(std::size_t i) const {
    // round-robin by rounds; finite parts stop contributing once exhausted
    std::size_t r = 0, consumed = 0;
    for (;;) {
        for (std::size_t p = 0; p < parts_.size(); ++p) {
            if (sizes_[p] && r >= *sizes_[p]) continue;
            if (consumed == i) return parts_[p]->at(r);
            ++consumed;
        }
        ++r;
        bool any = false;
        for (std::size_t p = 0; p < parts_.size(); ++p)
            if (!sizes_[p] || r < *sizes_[p]) any = true;
        if (!any) throw Error("composite family exhausted at index " + std::to_string(i));
    }
}

} // namespace qsum
