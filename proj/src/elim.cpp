#include "qsum/elim.hpp"

#include <algorithm>

namespace qsum {

namespace {

void expr_axpy(std::map<std::size_t, Scalar>& acc, const Scalar& c, const std::map<std::size_t, Scalar>& o) {
    if (c.is_zero()) return;
    for (const auto& [j, v] : o) {
        auto it = acc.find(j);
        if (it == acc.end()) {
            acc.emplace(j, v * c);
        } else {
            it->second += v * c;
            if (it->second.is_zero()) acc.erase(it);
        }
    }
}

} // namespace

bool Eliminator::insert(const VectorFin& v) {
    require_same_field(field_, v.field());
    std::size_t tag = inserted_++;
    VectorFin r = v;
    std::map<std::size_t, Scalar> expr;
    expr.emplace(tag, Scalar::one(field_));

    while (!r.is_zero()) {
        Index p = r.min_index();
        auto it = by_pivot_.find(p);
        if (it == by_pivot_.end()) break;
        const Row& row = rows_[it->second];
        Scalar c = -r.coeff(p);
        r.axpy(c, row.vec);
        expr_axpy(expr, c, row.expr);
    }
    if (r.is_zero()) return false;

    Index p = r.min_index();
    Scalar inv = r.coeff(p).inverse();
    r = r.scaled(inv);
    std::map<std::size_t, Scalar> scaled_expr;
    for (const auto& [j, c] : expr) scaled_expr.emplace(j, c * inv);

    // back-eliminate the new pivot from existing rows to stay in RREF
    for (auto& row : rows_) {
        Scalar c = row.vec.coeff(p);
        if (!c.is_zero()) {
            row.vec.axpy(-c, r);
            expr_axpy(row.expr, -c, scaled_expr);
        }
    }

    by_pivot_.emplace(p, rows_.size());
    rows_.emplace_back(std::move(r), std::move(scaled_expr), p);
    pivot_list_.push_back(p);
    std::sort(pivot_list_.begin(), pivot_list_.end());
    return true;
}

VectorFin Eliminator::reduce(const VectorFin& v) const {
    require_same_field(field_, v.field());
    VectorFin r = v;
    while (!r.is_zero()) {
        Index p = r.min_index();
        auto it = by_pivot_.find(p);
        if (it == by_pivot_.end()) break;
        r.axpy(-r.coeff(p), rows_[it->second].vec);
    }
    return r;
}

std::optional<std::map<std::size_t, Scalar>> Eliminator::express(const VectorFin& v) const {
    require_same_field(field_, v.field());
    VectorFin r = v;
    std::map<std::size_t, Scalar> expr;
    while (!r.is_zero()) {
        Index p = r.min_index();
        auto it = by_pivot_.find(p);
        if (it == by_pivot_.end()) return std::nullopt;
        const Row& row = rows_[it->second];
        Scalar c = r.coeff(p);
        r.axpy(-c, row.vec);
        expr_axpy(expr, c, row.expr);
    }
    return expr;
}

bool Eliminator::spans_exact_prefix(Index p) const {
    if (static_cast<Index>(rows_.size()) != p) return false;
    for (const auto& row : rows_) {
        if (row.vec.is_zero()) return false;
        if (row.vec.max_index() >= p) return false;
    }
    return true;
}

} // namespace qsum
