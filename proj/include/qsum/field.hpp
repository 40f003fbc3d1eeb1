#ifndef QSUM_FIELD_HPP
#define QSUM_FIELD_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

#include "qsum/errors.hpp"

namespace qsum {

using Int = boost::multiprecision::cpp_int;

enum class FieldKind { Rationals, PrimeField };

/// Ground field of every scalar: either Q or F_p for a prime p.
struct FieldSpec {
    FieldKind kind = FieldKind::Rationals;
    std::int64_t characteristic = 0; // 0 for Q, the prime p otherwise

    static FieldSpec rationals() { return FieldSpec{FieldKind::Rationals, 0}; }
    static FieldSpec prime(std::int64_t p);

    bool operator==(const FieldSpec& o) const {
        return kind == o.kind && characteristic == o.characteristic;
    }
    bool operator!=(const FieldSpec& o) const { return !(*this == o); }

    std::string str() const;
};

void require_same_field(const FieldSpec& a, const FieldSpec& b);

/// Exact field element. Over Q a reduced fraction with positive denominator,
/// over F_p a residue in [0, p). Canonical form is unique, so operator== is
/// plain representation equality.
class Scalar {
  public:
    Scalar() : field_(FieldSpec::rationals()), num_(0), den_(1) {}

    static Scalar zero(const FieldSpec& f) { return of_int(f, 0); }
    static Scalar one(const FieldSpec& f) { return of_int(f, 1); }
    static Scalar of_int(const FieldSpec& f, const Int& n);
    static Scalar fraction(const FieldSpec& f, const Int& num, const Int& den);

    const FieldSpec& field() const { return field_; }
    const Int& num() const { return num_; }
    const Int& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;
    Scalar operator-() const;
    Scalar inverse() const;

    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    bool operator==(const Scalar& o) const {
        return field_ == o.field_ && num_ == o.num_ && den_ == o.den_;
    }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    /// Canonical total order used for deterministic root ordering:
    /// numeric order over Q, residue order over F_p.
    bool operator<(const Scalar& o) const;

    std::string str() const;

  private:
    Scalar(const FieldSpec& f, Int num, Int den) : field_(f), num_(std::move(num)), den_(std::move(den)) {}
    void canonicalize();

    FieldSpec field_;
    Int num_;
    Int den_; // always 1 over F_p
};

/// Parses "num", "num/den" (Q) or a residue (F_p). Throws ParseError.
Scalar parse_scalar(const FieldSpec& f, const std::string& text);

} // namespace qsum

#endif
