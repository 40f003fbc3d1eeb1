#include "qsum/op.hpp"

#include <numeric>

#include "qsum/elim.hpp"
#include "qsum/errors.hpp"

namespace qsum {

namespace {

Index lcm_idx(Index a, Index b) { return std::lcm(a, b); }

const Scalar& pattern_at(const std::vector<Scalar>& pattern, Index n) {
    return pattern[static_cast<std::size_t>(n % static_cast<Index>(pattern.size()))];
}

VectorFin banded_column(const FieldSpec& f, const PeriodicBands& bands, Index residue, Index n) {
    VectorFin col(f);
    for (const auto& band : bands.bands) {
        const Scalar& c = band.pattern[static_cast<std::size_t>(residue % static_cast<Index>(band.pattern.size()))];
        if (c.is_zero()) continue;
        Index target = n + band.offset;
        if (target < 0) continue; // truncated at the bottom edge
        col.set(target, col.coeff(target) + c);
    }
    return col;
}

struct CompanionLayout {
    Index total = 0;
    std::vector<Index> offsets; // offset of block i within a cycle
};

CompanionLayout companion_layout(const CompanionData& d) {
    CompanionLayout l;
    for (const auto& p : d.cycle) {
        l.offsets.push_back(l.total);
        l.total += p.degree();
    }
    return l;
}

} // namespace

struct MappedEvalState {
    explicit MappedEvalState(const FieldSpec& f) : elim(f) {}
    std::mutex mu;
    Eliminator elim;
    std::vector<VectorFin> images;
    std::size_t pulled = 0;
};

// ---- constructors ----

namespace {
OpPtr mk(OpKind k, const FieldSpec& f, OpData d) { return std::make_shared<Op>(k, f, std::move(d)); }
} // namespace

OpPtr make_shift(const FieldSpec& f) { return mk(OpKind::Shift, f, ShiftData{}); }
OpPtr make_downshift(const FieldSpec& f) { return mk(OpKind::DownShift, f, DownShiftData{}); }

OpPtr make_diag_periodic(std::vector<Scalar> pattern) {
    if (pattern.empty()) throw Error("empty diagonal pattern");
    FieldSpec f = pattern.front().field();
    for (const auto& c : pattern) require_same_field(f, c.field());
    return mk(OpKind::DiagPeriodic, f, DiagPeriodicData{std::move(pattern)});
}

OpPtr make_banded(const FieldSpec& f, PeriodicBands bands) {
    if (bands.period < 1) throw Error("banded period must be >= 1");
    for (auto& b : bands.bands) {
        if (static_cast<Index>(b.pattern.size()) != bands.period) throw Error("band pattern length must equal the period");
        for (const auto& c : b.pattern) require_same_field(f, c.field());
    }
    return mk(OpKind::Banded, f, BandedData{std::move(bands)});
}

OpPtr make_companion_sum(std::vector<Polynomial> cycle) {
    if (cycle.empty()) throw Error("empty companion cycle");
    FieldSpec f = cycle.front().field();
    for (auto& p : cycle) {
        require_same_field(f, p.field());
        if (p.degree() < 1) throw Error("companion blocks need degree >= 1");
        if (!p.leading().is_one()) throw Error("companion blocks must be monic");
    }
    return mk(OpKind::Companion, f, CompanionData{std::move(cycle)});
}

OpPtr make_patch(OpPtr base, std::map<Index, VectorFin> columns) {
    FieldSpec f = base->field;
    for (const auto& [i, v] : columns) {
        if (i < 0) throw Error("negative patched column");
        require_same_field(f, v.field());
    }
    return mk(OpKind::Patch, f, PatchData{std::move(base), std::move(columns)});
}

OpPtr make_direct_sum(OpPtr left, OpPtr right) {
    require_same_field(left->field, right->field);
    FieldSpec f = left->field;
    return mk(OpKind::DirectSum, f, DirectSumData{std::move(left), std::move(right)});
}

OpPtr make_scalar_id(const Scalar& value) { return mk(OpKind::ScalarId, value.field(), ScalarIdData{value}); }

OpPtr make_rule_table(const FieldSpec& f, std::map<Index, VectorFin> exceptions, TailRule tail) {
    for (const auto& [i, v] : exceptions) {
        if (i < 0 || i >= tail.start) throw Error("rule table exceptions must sit below the tail start");
        require_same_field(f, v.field());
    }
    if (tail.bands.period < 1) throw Error("tail period must be >= 1");
    for (const auto& b : tail.bands.bands)
        if (static_cast<Index>(b.pattern.size()) != tail.bands.period)
            throw Error("tail band pattern length must equal the period");
    return mk(OpKind::RuleTable, f, RuleTableData{std::move(exceptions), std::move(tail)});
}

OpPtr make_mapped(FamilyPtr family) {
    FieldSpec f = family->field();
    return mk(OpKind::Mapped, f, MappedData{std::move(family)});
}

OpPtr op_add(OpPtr a, OpPtr b) {
    require_same_field(a->field, b->field);
    FieldSpec f = a->field;
    return mk(OpKind::Sum, f, BinaryData{std::move(a), std::move(b)});
}

OpPtr op_sub(OpPtr a, OpPtr b) {
    require_same_field(a->field, b->field);
    FieldSpec f = a->field;
    return mk(OpKind::Diff, f, BinaryData{std::move(a), std::move(b)});
}

OpPtr op_scale(const Scalar& c, OpPtr a) {
    require_same_field(c.field(), a->field);
    FieldSpec f = a->field;
    return mk(OpKind::Scale, f, ScaleData{c, std::move(a)});
}

OpPtr op_compose(OpPtr a, OpPtr b) {
    require_same_field(a->field, b->field);
    FieldSpec f = a->field;
    return mk(OpKind::Compose, f, BinaryData{std::move(a), std::move(b)});
}

// ---- evaluation ----

namespace {

constexpr std::size_t kMappedPullBase = 4096;
constexpr std::size_t kMappedPullPerColumn = 64;

VectorFin embed_interleaved(const VectorFin& v, Index parity) {
    VectorFin r(v.field());
    for (const auto& [i, c] : v.entries()) r.set(2 * i + parity, c);
    return r;
}

VectorFin mapped_column(const Op& op, const MappedData& d, Index n);

VectorFin compute_column(const Op& op, Index n) {
    const FieldSpec& f = op.field;
    switch (op.kind) {
        case OpKind::Shift:
            return VectorFin::unit(f, n + 1);
        case OpKind::DownShift: {
            VectorFin col(f);
            if (n > 0) col.set(n - 1, Scalar::one(f));
            return col;
        }
        case OpKind::DiagPeriodic: {
            const auto& d = std::get<DiagPeriodicData>(op.data);
            VectorFin col(f);
            const Scalar& c = pattern_at(d.pattern, n);
            if (!c.is_zero()) col.set(n, c);
            return col;
        }
        case OpKind::Banded: {
            const auto& d = std::get<BandedData>(op.data);
            return banded_column(f, d.bands, n % d.bands.period, n);
        }
        case OpKind::Companion: {
            const auto& d = std::get<CompanionData>(op.data);
            CompanionLayout l = companion_layout(d);
            Index m = n / l.total, r = n % l.total;
            std::size_t i = 0;
            while (i + 1 < d.cycle.size() && l.offsets[i + 1] <= r) ++i;
            Index j = r - l.offsets[i];
            Index deg = d.cycle[i].degree();
            VectorFin col(f);
            if (j < deg - 1) {
                col.set(n + 1, Scalar::one(f));
            } else {
                Index block_base = m * l.total + l.offsets[i];
                for (Index k = 0; k < deg; ++k) {
                    Scalar c = -d.cycle[i].coeff(static_cast<int>(k));
                    if (!c.is_zero()) col.set(block_base + k, c);
                }
            }
            return col;
        }
        case OpKind::Patch: {
            const auto& d = std::get<PatchData>(op.data);
            auto it = d.columns.find(n);
            if (it != d.columns.end()) return it->second;
            return op_column(d.base, n);
        }
        case OpKind::DirectSum: {
            const auto& d = std::get<DirectSumData>(op.data);
            if (n % 2 == 0) return embed_interleaved(op_column(d.left, n / 2), 0);
            return embed_interleaved(op_column(d.right, (n - 1) / 2), 1);
        }
        case OpKind::ScalarId: {
            const auto& d = std::get<ScalarIdData>(op.data);
            VectorFin col(f);
            if (!d.value.is_zero()) col.set(n, d.value);
            return col;
        }
        case OpKind::Sum: {
            const auto& d = std::get<BinaryData>(op.data);
            return op_column(d.a, n) + op_column(d.b, n);
        }
        case OpKind::Diff: {
            const auto& d = std::get<BinaryData>(op.data);
            return op_column(d.a, n) - op_column(d.b, n);
        }
        case OpKind::Scale: {
            const auto& d = std::get<ScaleData>(op.data);
            return op_column(d.a, n).scaled(d.c);
        }
        case OpKind::Compose: {
            const auto& d = std::get<BinaryData>(op.data);
            return apply(d.a, op_column(d.b, n));
        }
        case OpKind::RuleTable: {
            const auto& d = std::get<RuleTableData>(op.data);
            auto it = d.exceptions.find(n);
            if (it != d.exceptions.end()) return it->second;
            if (n < d.tail.start) return VectorFin(f); // unspecified low columns default to zero
            return banded_column(f, d.tail.bands, (n - d.tail.start) % d.tail.bands.period, n);
        }
        case OpKind::Mapped:
            return mapped_column(op, std::get<MappedData>(op.data), n);
    }
    throw Error("unreachable operator kind");
}

VectorFin mapped_column(const Op& op, const MappedData& d, Index n) {
    {
        std::lock_guard<std::mutex> lock(op.memo_mu);
        if (!op.mapped_state) op.mapped_state = std::make_shared<MappedEvalState>(op.field);
    }
    MappedEvalState& st = *op.mapped_state;
    std::lock_guard<std::mutex> state_lock(st.mu);
    VectorFin target = VectorFin::unit(op.field, n);
    std::size_t cap = kMappedPullBase + kMappedPullPerColumn * static_cast<std::size_t>(n + 1);
    for (;;) {
        auto coords = st.elim.express(target);
        if (coords) {
            VectorFin img(op.field);
            for (const auto& [j, c] : *coords) img.axpy(c, st.images[j]);
            return img;
        }
        if (st.pulled >= cap)
            throw CapExceeded("basis family did not reach e_" + std::to_string(n) + " within " +
                              std::to_string(st.pulled) + " pulls");
        auto [basis, image] = d.family->at(st.pulled);
        ++st.pulled;
        if (!st.elim.insert(basis))
            throw Error("basis family vector " + std::to_string(st.pulled - 1) + " is dependent (kind " +
                        d.family->kind() + ")");
        st.images.push_back(std::move(image));
    }
}

} // namespace

VectorFin op_column(const OpPtr& u, Index n) {
    if (n < 0) throw Error("negative column index");
    {
        std::lock_guard<std::mutex> lock(u->memo_mu);
        auto it = u->memo_cols.find(n);
        if (it != u->memo_cols.end()) return it->second;
    }
    VectorFin col = compute_column(*u, n);
    std::lock_guard<std::mutex> lock(u->memo_mu);
    return u->memo_cols.emplace(n, std::move(col)).first->second;
}

VectorFin apply(const OpPtr& u, const VectorFin& x) {
    require_same_field(u->field, x.field());
    VectorFin r(u->field);
    for (const auto& [i, c] : x.entries()) r.axpy(c, op_column(u, i));
    return r;
}

VectorFin eval_poly_vec(const Polynomial& p, const OpPtr& u, const VectorFin& x) {
    require_same_field(p.field(), u->field);
    require_same_field(p.field(), x.field());
    VectorFin acc(u->field);
    for (int k = p.degree(); k >= 0; --k) {
        acc = apply(u, acc);
        acc.axpy(p.coeff(k), x);
    }
    return acc;
}

AnnihilationReport verify_annihilated(const OpPtr& u, const Polynomial& p, Index prefix) {
    if (prefix < 1) throw Error("prefix must be >= 1");
    AnnihilationReport rep;
    rep.prefix = prefix;
    for (Index n = 0; n < prefix; ++n) {
        VectorFin r = eval_poly_vec(p, u, VectorFin::unit(u->field, n));
        if (!r.is_zero()) {
            rep.pass = false;
            rep.first_fail = n;
            return rep;
        }
    }
    rep.pass = true;
    return rep;
}

std::optional<Invariance> op_invariance(const OpPtr& u) {
    switch (u->kind) {
        case OpKind::Shift:
            return Invariance{0, 1, 1, 1};
        case OpKind::DownShift:
            return Invariance{1, 1, -1, -1};
        case OpKind::DiagPeriodic: {
            const auto& d = std::get<DiagPeriodicData>(u->data);
            return Invariance{0, static_cast<Index>(d.pattern.size()), 0, 0};
        }
        case OpKind::Banded: {
            const auto& d = std::get<BandedData>(u->data);
            Index lo = 0, hi = 0;
            for (const auto& b : d.bands.bands) {
                lo = std::min(lo, b.offset);
                hi = std::max(hi, b.offset);
            }
            return Invariance{std::max<Index>(0, -lo), d.bands.period, lo, hi};
        }
        case OpKind::Companion: {
            const auto& d = std::get<CompanionData>(u->data);
            Index total = companion_layout(d).total;
            return Invariance{0, total, -(total - 1), total - 1};
        }
        case OpKind::Patch: {
            const auto& d = std::get<PatchData>(u->data);
            auto base = op_invariance(d.base);
            if (!base) return std::nullopt;
            Index start = base->start;
            if (!d.columns.empty()) start = std::max(start, d.columns.rbegin()->first + 1);
            return Invariance{start, base->stride, base->lo, base->hi};
        }
        case OpKind::DirectSum: {
            const auto& d = std::get<DirectSumData>(u->data);
            auto l = op_invariance(d.left), r = op_invariance(d.right);
            if (!l || !r) return std::nullopt;
            Index stride = 2 * lcm_idx(l->stride, r->stride);
            Index start = 2 * std::max(l->start, r->start) + 1;
            return Invariance{start, stride, 2 * std::min(l->lo, r->lo), 2 * std::max(l->hi, r->hi)};
        }
        case OpKind::ScalarId:
            return Invariance{0, 1, 0, 0};
        case OpKind::Sum:
        case OpKind::Diff: {
            const auto& d = std::get<BinaryData>(u->data);
            auto a = op_invariance(d.a), b = op_invariance(d.b);
            if (!a || !b) return std::nullopt;
            return Invariance{std::max(a->start, b->start), lcm_idx(a->stride, b->stride), std::min(a->lo, b->lo),
                              std::max(a->hi, b->hi)};
        }
        case OpKind::Scale: {
            const auto& d = std::get<ScaleData>(u->data);
            if (d.c.is_zero()) return Invariance{0, 1, 0, 0};
            return op_invariance(d.a);
        }
        case OpKind::Compose: {
            const auto& d = std::get<BinaryData>(u->data);
            auto a = op_invariance(d.a), b = op_invariance(d.b);
            if (!a || !b) return std::nullopt;
            Index start = std::max(b->start, a->start - b->lo);
            return Invariance{start, lcm_idx(a->stride, b->stride), a->lo + b->lo, a->hi + b->hi};
        }
        case OpKind::RuleTable: {
            const auto& d = std::get<RuleTableData>(u->data);
            Index lo = 0, hi = 0;
            for (const auto& b : d.tail.bands.bands) {
                lo = std::min(lo, b.offset);
                hi = std::max(hi, b.offset);
            }
            Index start = std::max(d.tail.start, -lo);
            // residues are taken relative to tail.start, so the stride keeps alignment
            return Invariance{start, d.tail.bands.period, lo, hi};
        }
        case OpKind::Mapped:
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<bool> op_equal_structural(const OpPtr& a, const OpPtr& b) {
    if (a->field != b->field) return false;
    auto ia = op_invariance(a), ib = op_invariance(b);
    if (!ia || !ib) return std::nullopt;
    Index bound = std::max(ia->start, ib->start) + lcm_idx(ia->stride, ib->stride);
    for (Index n = 0; n < bound; ++n)
        if (op_column(a, n) != op_column(b, n)) return false;
    return true;
}

std::optional<bool> op_is_zero_structural(const OpPtr& z) {
    auto inv = op_invariance(z);
    if (!inv) return std::nullopt;
    Index bound = inv->start + inv->stride;
    for (Index n = 0; n < bound; ++n)
        if (!op_column(z, n).is_zero()) return false;
    return true;
}

} // namespace qsum
