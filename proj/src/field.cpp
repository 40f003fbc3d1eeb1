#include "qsum/field.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace qsum {

namespace {

bool is_prime(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

Int mod_reduce(Int n, std::int64_t p) {
    Int m = n % p;
    if (m < 0) m += p;
    return m;
}

// extended Euclid on residues; p prime so every non-zero residue is invertible
Int mod_inverse(const Int& a, std::int64_t p) {
    Int old_r = a, r = p;
    Int old_s = 1, s = 0;
    while (r != 0) {
        Int q = old_r / r;
        Int tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1) throw Error("residue not invertible mod " + std::to_string(p));
    return mod_reduce(old_s, p);
}

} // namespace

FieldSpec FieldSpec::prime(std::int64_t p) {
    if (!is_prime(p)) throw Error("characteristic must be prime, got " + std::to_string(p));
    return FieldSpec{FieldKind::PrimeField, p};
}

std::string FieldSpec::str() const {
    if (kind == FieldKind::Rationals) return "Q";
    return "F" + std::to_string(characteristic);
}

void require_same_field(const FieldSpec& a, const FieldSpec& b) {
    if (a != b) throw FieldMismatch("field mismatch: " + a.str() + " vs " + b.str());
}

void Scalar::canonicalize() {
    if (field_.kind == FieldKind::PrimeField) {
        num_ = mod_reduce(num_, field_.characteristic);
        den_ = 1;
        return;
    }
    if (num_ == 0) {
        den_ = 1;
        return;
    }
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    Int g = boost::multiprecision::gcd(num_ < 0 ? Int(-num_) : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Scalar Scalar::of_int(const FieldSpec& f, const Int& n) {
    Scalar s(f, n, 1);
    s.canonicalize();
    return s;
}

Scalar Scalar::fraction(const FieldSpec& f, const Int& num, const Int& den) {
    if (den == 0) throw Error("zero denominator");
    if (f.kind == FieldKind::PrimeField) {
        Int d = mod_reduce(den, f.characteristic);
        if (d == 0) throw Error("denominator vanishes mod " + std::to_string(f.characteristic));
        Scalar s(f, mod_reduce(num, f.characteristic) * mod_inverse(d, f.characteristic), 1);
        s.canonicalize();
        return s;
    }
    Scalar s(f, num, den);
    s.canonicalize();
    return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
    require_same_field(field_, o.field_);
    Scalar s(field_, num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    s.canonicalize();
    return s;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
    require_same_field(field_, o.field_);
    Scalar s(field_, num_ * o.num_, den_ * o.den_);
    s.canonicalize();
    return s;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::operator-() const {
    Scalar s(field_, -num_, den_);
    s.canonicalize();
    return s;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw Error("division by zero");
    if (field_.kind == FieldKind::PrimeField)
        return Scalar(field_, mod_inverse(num_, field_.characteristic), 1);
    Scalar s(field_, den_, num_);
    s.canonicalize();
    return s;
}

bool Scalar::operator<(const Scalar& o) const {
    require_same_field(field_, o.field_);
    if (field_.kind == FieldKind::PrimeField) return num_ < o.num_;
    return num_ * o.den_ < o.num_ * den_;
}

std::string Scalar::str() const {
    if (den_ == 1) return num_.str();
    return num_.str() + "/" + den_.str();
}

Scalar parse_scalar(const FieldSpec& f, const std::string& text) {
    if (text.empty()) throw ParseError("empty scalar");
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Scalar::of_int(f, Int(text));
        Int num(text.substr(0, slash));
        Int den(text.substr(slash + 1));
        return Scalar::fraction(f, num, den);
    } catch (const std::exception& e) {
        throw ParseError("bad scalar '" + text + "': " + e.what());
    }
}

} // namespace qsum
