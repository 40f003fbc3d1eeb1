#include "qsum/classify.hpp"

#include <algorithm>

#include "qsum/errors.hpp"

namespace qsum {

namespace {

bool all_equal(const std::vector<Scalar>& pattern, const Scalar& c) {
    for (const auto& v : pattern)
        if (v != c) return false;
    return true;
}

bool all_zero(const std::vector<Scalar>& pattern) {
    for (const auto& v : pattern)
        if (!v.is_zero()) return false;
    return true;
}

bool all_nonzero(const std::vector<Scalar>& pattern) {
    for (const auto& v : pattern)
        if (v.is_zero()) return false;
    return true;
}

// true iff the banded rule acts as lambda * id on every column it governs
bool bands_are_scalar(const FieldSpec& f, const PeriodicBands& bands, const Scalar& lambda) {
    std::vector<Scalar> diag(static_cast<std::size_t>(bands.period), Scalar::zero(f));
    for (const auto& b : bands.bands) {
        if (b.offset == 0) {
            for (std::size_t r = 0; r < diag.size(); ++r) diag[r] += b.pattern[r];
        } else if (!all_zero(b.pattern)) {
            return false;
        }
    }
    return all_equal(diag, lambda);
}

OperatorClassTags tags_zero_op(const FieldSpec& f) {
    OperatorClassTags t;
    t.is_torsion = TriState::Yes;
    t.dominant_candidate = Scalar::zero(f);
    t.deviation_rank_finite = TriState::Yes;
    return t;
}

OperatorClassTags tags_scalar(const Scalar& v) {
    OperatorClassTags t;
    t.is_torsion = TriState::Yes;
    t.dominant_candidate = v;
    t.deviation_rank_finite = TriState::Yes;
    return t;
}

// Tags for an eventually periodic banded rule whose exceptional region ends
// at `low_end` (columns below it are arbitrary but finitely many).
OperatorClassTags banded_tags(const FieldSpec& f, const PeriodicBands& bands, Index rule_start, Index low_end) {
    OperatorClassTags t;
    std::vector<const BandEntry*> live;
    for (const auto& b : bands.bands)
        if (!all_zero(b.pattern)) live.push_back(&b);

    if (live.empty()) {
        // zero beyond the exceptional region: a finite-rank perturbation of 0
        t = tags_zero_op(f);
        return t;
    }
    if (live.size() == 1 && live.front()->offset == 0) {
        const auto& pat = live.front()->pattern;
        t.is_torsion = TriState::Yes;
        if (all_equal(pat, pat.front())) {
            t.dominant_candidate = pat.front();
            t.deviation_rank_finite = TriState::Yes;
        } else {
            t.deviation_rank_finite = TriState::No;
        }
        return t;
    }
    bool all_negative = true, all_positive = true;
    for (const auto* b : live) {
        if (b->offset >= 0) all_negative = false;
        if (b->offset <= 0) all_positive = false;
    }
    if (all_negative) {
        t.is_torsion = TriState::Yes;
        t.deviation_rank_finite = TriState::No;
        return t;
    }
    if (all_positive && live.size() == 1 && all_nonzero(live.front()->pattern)) {
        Index m = live.front()->offset;
        t.is_torsion = TriState::No;
        t.deviation_rank_finite = TriState::No;
        Index base = std::max(rule_start, low_end);
        for (Index j = 0; j < m; ++j) t.free_part_generators.push_back(base + j);
        return t;
    }
    return t; // unknown
}

} // namespace

OperatorClassTags classify_structure(const OpPtr& u) {
    const FieldSpec& f = u->field;
    OperatorClassTags t;
    switch (u->kind) {
        case OpKind::Shift: {
            t.is_torsion = TriState::No;
            t.deviation_rank_finite = TriState::No;
            t.free_part_generators = {0};
            return t;
        }
        case OpKind::DownShift: {
            t.is_torsion = TriState::Yes;
            t.deviation_rank_finite = TriState::No;
            return t;
        }
        case OpKind::DiagPeriodic: {
            const auto& d = std::get<DiagPeriodicData>(u->data);
            t.is_torsion = TriState::Yes;
            if (all_equal(d.pattern, d.pattern.front())) {
                t.dominant_candidate = d.pattern.front();
                t.deviation_rank_finite = TriState::Yes;
            } else {
                t.deviation_rank_finite = TriState::No;
            }
            return t;
        }
        case OpKind::Banded: {
            const auto& d = std::get<BandedData>(u->data);
            return banded_tags(f, d.bands, 0, 0);
        }
        case OpKind::Companion: {
            const auto& d = std::get<CompanionData>(u->data);
            t.is_torsion = TriState::Yes;
            bool scalar_like = true;
            Scalar lambda = Scalar::zero(f);
            for (std::size_t i = 0; i < d.cycle.size(); ++i) {
                if (d.cycle[i].degree() != 1) {
                    scalar_like = false;
                    break;
                }
                Scalar root = -d.cycle[i].coeff(0);
                if (i == 0)
                    lambda = root;
                else if (root != lambda)
                    scalar_like = false;
            }
            if (scalar_like) {
                t.dominant_candidate = lambda;
                t.deviation_rank_finite = TriState::Yes;
            } else {
                t.deviation_rank_finite = TriState::No;
            }
            return t;
        }
        case OpKind::Patch: {
            const auto& d = std::get<PatchData>(u->data);
            OperatorClassTags base = classify_structure(d.base);
            t.is_torsion = base.is_torsion;
            t.deviation_rank_finite = base.deviation_rank_finite;
            t.dominant_candidate = base.dominant_candidate;
            if (base.is_torsion == TriState::No && !base.free_part_generators.empty()) {
                auto inv = op_invariance(d.base);
                // chains must move strictly upward so they never re-enter the
                // patched region
                if (inv && inv->lo >= 1) {
                    Index bound = d.columns.empty() ? 0 : d.columns.rbegin()->first + 1;
                    Index base_lo = *std::min_element(base.free_part_generators.begin(), base.free_part_generators.end());
                    Index start = std::max(bound, base_lo);
                    Index m = static_cast<Index>(base.free_part_generators.size());
                    for (Index j = 0; j < m; ++j) t.free_part_generators.push_back(start + j);
                }
            }
            return t;
        }
        case OpKind::DirectSum: {
            const auto& d = std::get<DirectSumData>(u->data);
            OperatorClassTags l = classify_structure(d.left);
            OperatorClassTags r = classify_structure(d.right);
            if (l.is_torsion == TriState::Yes && r.is_torsion == TriState::Yes)
                t.is_torsion = TriState::Yes;
            else if (l.is_torsion == TriState::No || r.is_torsion == TriState::No)
                t.is_torsion = TriState::No;
            if (l.deviation_rank_finite == TriState::Yes && r.deviation_rank_finite == TriState::Yes) {
                if (*l.dominant_candidate == *r.dominant_candidate) {
                    t.dominant_candidate = l.dominant_candidate;
                    t.deviation_rank_finite = TriState::Yes;
                } else {
                    t.deviation_rank_finite = TriState::No;
                }
            } else if (l.deviation_rank_finite == TriState::No || r.deviation_rank_finite == TriState::No) {
                t.deviation_rank_finite = TriState::No;
            }
            bool l_ok = !l.free_part_generators.empty() || l.is_torsion == TriState::Yes;
            bool r_ok = !r.free_part_generators.empty() || r.is_torsion == TriState::Yes;
            if (l_ok && r_ok) {
                for (Index g : l.free_part_generators) t.free_part_generators.push_back(2 * g);
                for (Index g : r.free_part_generators) t.free_part_generators.push_back(2 * g + 1);
            }
            return t;
        }
        case OpKind::ScalarId:
            return tags_scalar(std::get<ScalarIdData>(u->data).value);
        case OpKind::Sum:
        case OpKind::Diff: {
            const auto& d = std::get<BinaryData>(u->data);
            bool diff = u->kind == OpKind::Diff;
            auto scalar_of = [](const OpPtr& x) -> std::optional<Scalar> {
                if (x->kind == OpKind::ScalarId) return std::get<ScalarIdData>(x->data).value;
                return std::nullopt;
            };
            if (auto mu = scalar_of(d.a)) {
                OperatorClassTags other = classify_structure(d.b);
                t.is_torsion = other.is_torsion;
                t.free_part_generators = other.free_part_generators;
                t.deviation_rank_finite = other.deviation_rank_finite;
                if (other.dominant_candidate)
                    t.dominant_candidate = diff ? (*mu - *other.dominant_candidate) : (*mu + *other.dominant_candidate);
                return t;
            }
            if (auto mu = scalar_of(d.b)) {
                OperatorClassTags other = classify_structure(d.a);
                t.is_torsion = other.is_torsion;
                t.free_part_generators = other.free_part_generators;
                t.deviation_rank_finite = other.deviation_rank_finite;
                if (other.dominant_candidate)
                    t.dominant_candidate = diff ? (*other.dominant_candidate - *mu) : (*other.dominant_candidate + *mu);
                return t;
            }
            OperatorClassTags a = classify_structure(d.a);
            OperatorClassTags b = classify_structure(d.b);
            if (a.deviation_rank_finite == TriState::Yes && b.deviation_rank_finite == TriState::Yes) {
                Scalar lam = diff ? (*a.dominant_candidate - *b.dominant_candidate)
                                  : (*a.dominant_candidate + *b.dominant_candidate);
                return tags_scalar(lam); // scalar + finite rank; torsion follows
            }
            return t; // unknown
        }
        case OpKind::Scale: {
            const auto& d = std::get<ScaleData>(u->data);
            if (d.c.is_zero()) return tags_zero_op(f);
            OperatorClassTags a = classify_structure(d.a);
            t = a;
            if (a.dominant_candidate) t.dominant_candidate = d.c * (*a.dominant_candidate);
            return t;
        }
        case OpKind::Compose:
            return t; // unknown
        case OpKind::RuleTable: {
            const auto& d = std::get<RuleTableData>(u->data);
            Index low_end = d.tail.start;
            return banded_tags(f, d.tail.bands, d.tail.start, low_end);
        }
        case OpKind::Mapped:
            return t; // unknown
    }
    return t;
}

std::optional<Index> finite_deviation_bound(const OpPtr& u, const Scalar& lambda) {
    const FieldSpec& f = u->field;
    switch (u->kind) {
        case OpKind::ScalarId:
            return std::get<ScalarIdData>(u->data).value == lambda ? std::optional<Index>(0) : std::nullopt;
        case OpKind::DiagPeriodic: {
            const auto& d = std::get<DiagPeriodicData>(u->data);
            return all_equal(d.pattern, lambda) ? std::optional<Index>(0) : std::nullopt;
        }
        case OpKind::Banded: {
            const auto& d = std::get<BandedData>(u->data);
            return bands_are_scalar(f, d.bands, lambda) ? std::optional<Index>(0) : std::nullopt;
        }
        case OpKind::Companion: {
            const auto& d = std::get<CompanionData>(u->data);
            for (const auto& p : d.cycle)
                if (p.degree() != 1 || -p.coeff(0) != lambda) return std::nullopt;
            return 0;
        }
        case OpKind::Patch: {
            const auto& d = std::get<PatchData>(u->data);
            auto b = finite_deviation_bound(d.base, lambda);
            if (!b) return std::nullopt;
            Index bound = *b;
            if (!d.columns.empty()) bound = std::max(bound, d.columns.rbegin()->first + 1);
            return bound;
        }
        case OpKind::DirectSum: {
            const auto& d = std::get<DirectSumData>(u->data);
            auto l = finite_deviation_bound(d.left, lambda);
            auto r = finite_deviation_bound(d.right, lambda);
            if (!l || !r) return std::nullopt;
            return std::max(2 * *l, 2 * *r + 1);
        }
        case OpKind::Sum:
        case OpKind::Diff: {
            const auto& d = std::get<BinaryData>(u->data);
            bool diff = u->kind == OpKind::Diff;
            if (d.a->kind == OpKind::ScalarId) {
                Scalar mu = std::get<ScalarIdData>(d.a->data).value;
                return finite_deviation_bound(d.b, diff ? (mu - lambda) : (lambda - mu));
            }
            if (d.b->kind == OpKind::ScalarId) {
                Scalar mu = std::get<ScalarIdData>(d.b->data).value;
                return finite_deviation_bound(d.a, diff ? (lambda + mu) : (lambda - mu));
            }
            OperatorClassTags a = classify_structure(d.a);
            OperatorClassTags b = classify_structure(d.b);
            if (a.dominant_candidate && b.dominant_candidate) {
                auto ba = finite_deviation_bound(d.a, *a.dominant_candidate);
                auto bb = finite_deviation_bound(d.b, *b.dominant_candidate);
                Scalar lam = diff ? (*a.dominant_candidate - *b.dominant_candidate)
                                  : (*a.dominant_candidate + *b.dominant_candidate);
                if (ba && bb && lam == lambda) return std::max(*ba, *bb);
            }
            return std::nullopt;
        }
        case OpKind::Scale: {
            const auto& d = std::get<ScaleData>(u->data);
            if (d.c.is_zero()) return lambda.is_zero() ? std::optional<Index>(0) : std::nullopt;
            return finite_deviation_bound(d.a, lambda / d.c);
        }
        case OpKind::RuleTable: {
            const auto& d = std::get<RuleTableData>(u->data);
            if (!bands_are_scalar(f, d.tail.bands, lambda)) return std::nullopt;
            return d.tail.start;
        }
        default:
            return std::nullopt;
    }
    (void)f;
}

ScalarPeel peel_scalar(const OpPtr& u) {
    const FieldSpec& f = u->field;
    Scalar zero = Scalar::zero(f), one = Scalar::one(f);
    if (u->kind == OpKind::Sum || u->kind == OpKind::Diff) {
        const auto& d = std::get<BinaryData>(u->data);
        bool diff = u->kind == OpKind::Diff;
        if (d.a->kind == OpKind::ScalarId) {
            Scalar mu = std::get<ScalarIdData>(d.a->data).value;
            ScalarPeel inner = peel_scalar(d.b);
            if (diff) return {mu - inner.mu, -inner.factor, inner.core};
            return {mu + inner.mu, inner.factor, inner.core};
        }
        if (d.b->kind == OpKind::ScalarId) {
            Scalar mu = std::get<ScalarIdData>(d.b->data).value;
            ScalarPeel inner = peel_scalar(d.a);
            if (diff) return {inner.mu - mu, inner.factor, inner.core};
            return {inner.mu + mu, inner.factor, inner.core};
        }
        return {zero, one, u};
    }
    if (u->kind == OpKind::Scale) {
        const auto& d = std::get<ScaleData>(u->data);
        ScalarPeel inner = peel_scalar(d.a);
        return {d.c * inner.mu, d.c * inner.factor, inner.core};
    }
    if (u->kind == OpKind::ScalarId) {
        return {std::get<ScalarIdData>(u->data).value, one, nullptr};
    }
    return {zero, one, u};
}

} // namespace qsum
