#include "qsum/vec.hpp"

#include <sstream>

namespace qsum {

void VectorFin::set(Index i, const Scalar& c) {
    if (i < 0) throw Error("negative basis index");
    require_same_field(field_, c.field());
    if (c.is_zero())
        e_.erase(i);
    else
        e_[i] = c;
}

Index VectorFin::min_index() const {
    if (e_.empty()) throw Error("min_index of the zero vector");
    return e_.begin()->first;
}

Index VectorFin::max_index() const {
    if (e_.empty()) throw Error("max_index of the zero vector");
    return e_.rbegin()->first;
}

VectorFin VectorFin::operator+(const VectorFin& o) const {
    VectorFin r = *this;
    r.axpy(Scalar::one(field_), o);
    return r;
}

VectorFin VectorFin::operator-(const VectorFin& o) const {
    VectorFin r = *this;
    r.axpy(-Scalar::one(field_), o);
    return r;
}

VectorFin VectorFin::scaled(const Scalar& c) const {
    require_same_field(field_, c.field());
    VectorFin r(field_);
    if (c.is_zero()) return r;
    for (const auto& [i, v] : e_) r.e_.emplace(i, v * c);
    return r;
}

void VectorFin::axpy(const Scalar& c, const VectorFin& o) {
    require_same_field(field_, o.field_);
    require_same_field(field_, c.field());
    if (c.is_zero()) return;
    for (const auto& [i, v] : o.e_) {
        auto it = e_.find(i);
        if (it == e_.end()) {
            e_.emplace(i, v * c);
        } else {
            it->second += v * c;
            if (it->second.is_zero()) e_.erase(it);
        }
    }
}

VectorFin VectorFin::translated(Index offset) const {
    VectorFin r(field_);
    for (const auto& [i, v] : e_) {
        if (i + offset < 0) throw Error("translation pushes index below 0");
        r.e_.emplace(i + offset, v);
    }
    return r;
}

std::string VectorFin::str() const {
    if (e_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [i, v] : e_) {
        if (!first) os << " + ";
        first = false;
        if (!v.is_one()) os << v.str() << "*";
        os << "e" << i;
    }
    return os.str();
}

} // namespace qsum
