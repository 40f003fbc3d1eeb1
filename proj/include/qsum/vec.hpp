#ifndef QSUM_VEC_HPP
#define QSUM_VEC_HPP

#include <cstdint>
#include <map>
#include <string>

#include "qsum/field.hpp"

namespace qsum {

using Index = std::int64_t;

/// Finitely supported vector in V = bigoplus_{n in N} F e_n. Stored zero
/// coefficients are never kept, so equality is representation equality.
class VectorFin {
  public:
    explicit VectorFin(const FieldSpec& f) : field_(f) {}

    static VectorFin unit(const FieldSpec& f, Index i) {
        VectorFin v(f);
        v.set(i, Scalar::one(f));
        return v;
    }

    const FieldSpec& field() const { return field_; }
    const std::map<Index, Scalar>& entries() const { return e_; }
    bool is_zero() const { return e_.empty(); }
    std::size_t support_size() const { return e_.size(); }

    Scalar coeff(Index i) const {
        auto it = e_.find(i);
        return it == e_.end() ? Scalar::zero(field_) : it->second;
    }
    void set(Index i, const Scalar& c);

    /// Smallest / largest support index; only valid on non-zero vectors.
    Index min_index() const;
    Index max_index() const;

    VectorFin operator+(const VectorFin& o) const;
    VectorFin operator-(const VectorFin& o) const;
    VectorFin scaled(const Scalar& c) const;
    VectorFin operator-() const { return scaled(-Scalar::one(field_)); }

    /// this += c * o
    void axpy(const Scalar& c, const VectorFin& o);

    /// Index translation e_i -> e_{i+offset}; all resulting indices must stay
    /// non-negative.
    VectorFin translated(Index offset) const;

    bool operator==(const VectorFin& o) const { return field_ == o.field_ && e_ == o.e_; }
    bool operator!=(const VectorFin& o) const { return !(*this == o); }

    std::string str() const;

  private:
    FieldSpec field_;
    std::map<Index, Scalar> e_;
};

} // namespace qsum

#endif
