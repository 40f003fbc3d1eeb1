#include "qsum/poly.hpp"

#include <sstream>

namespace qsum {

Polynomial::Polynomial(const FieldSpec& f, std::vector<Scalar> coeffs) : field_(f), c_(std::move(coeffs)) {
    for (const auto& c : c_) require_same_field(field_, c.field());
    trim();
}

void Polynomial::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Polynomial Polynomial::constant(const Scalar& c) {
    Polynomial p(c.field());
    if (!c.is_zero()) p.c_ = {c};
    return p;
}

Polynomial Polynomial::linear_root(const Scalar& r) {
    Polynomial p(r.field());
    p.c_ = {-r, Scalar::one(r.field())};
    return p;
}

Polynomial Polynomial::from_ints(const FieldSpec& f, const std::vector<long long>& coeffs) {
    std::vector<Scalar> c;
    c.reserve(coeffs.size());
    for (long long v : coeffs) c.push_back(Scalar::of_int(f, v));
    return Polynomial(f, std::move(c));
}

Scalar Polynomial::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return Scalar::zero(field_);
    return c_[static_cast<std::size_t>(k)];
}

Scalar Polynomial::leading() const {
    if (is_zero()) throw ZeroPolynomial();
    return c_.back();
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    require_same_field(field_, o.field_);
    std::vector<Scalar> c(std::max(c_.size(), o.c_.size()), Scalar::zero(field_));
    for (std::size_t i = 0; i < c.size(); ++i) {
        Scalar v = Scalar::zero(field_);
        if (i < c_.size()) v += c_[i];
        if (i < o.c_.size()) v += o.c_[i];
        c[i] = v;
    }
    return Polynomial(field_, std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o.scaled(-Scalar::one(field_)); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    require_same_field(field_, o.field_);
    if (is_zero() || o.is_zero()) return Polynomial(field_);
    std::vector<Scalar> c(c_.size() + o.c_.size() - 1, Scalar::zero(field_));
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
    return Polynomial(field_, std::move(c));
}

Polynomial Polynomial::scaled(const Scalar& s) const {
    std::vector<Scalar> c;
    c.reserve(c_.size());
    for (const auto& v : c_) c.push_back(v * s);
    return Polynomial(field_, std::move(c));
}

Scalar Polynomial::eval(const Scalar& x) const {
    Scalar acc = Scalar::zero(field_);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::shifted_var(const Scalar& shift) const {
    // Horner in the shifted variable: p(t+s) = ((c_n (t+s) + c_{n-1})(t+s) + ...)
    Polynomial acc(field_);
    Polynomial var(field_, {shift, Scalar::one(field_)});
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * var + Polynomial::constant(*it);
    return acc;
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
    require_same_field(field_, divisor.field_);
    if (divisor.is_zero()) throw ZeroPolynomial("division by the zero polynomial");
    Polynomial q(field_);
    Polynomial r = *this;
    Scalar lead_inv = divisor.leading().inverse();
    int d = divisor.degree();
    while (!r.is_zero() && r.degree() >= d) {
        int k = r.degree() - d;
        Scalar c = r.leading() * lead_inv;
        std::vector<Scalar> mono(static_cast<std::size_t>(k) + 1, Scalar::zero(field_));
        mono.back() = c;
        Polynomial m(field_, std::move(mono));
        q = q + m;
        r = r - m * divisor;
    }
    return {q, r};
}

Polynomial Polynomial::gcd(Polynomial a, Polynomial b) {
    while (!b.is_zero()) {
        Polynomial r = a.divmod(b).second;
        a = b;
        b = r;
    }
    if (a.is_zero()) return a;
    return monicize(a);
}

std::string Polynomial::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        Scalar c = coeff(k);
        if (c.is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        if (k == 0 || !c.is_one()) os << c.str();
        if (k > 0) {
            if (!c.is_one()) os << "*";
            os << "t";
            if (k > 1) os << "^" << k;
        }
    }
    return os.str();
}

Polynomial monicize(const Polynomial& p) {
    if (p.is_zero()) throw ZeroPolynomial();
    Scalar lead = p.leading();
    if (lead.is_one()) return p;
    return p.scaled(lead.inverse());
}

Scalar poly_trace(const Polynomial& p) {
    if (p.degree() < 1) throw ConstantPolynomial();
    Polynomial m = monicize(p);
    return -m.coeff(m.degree() - 1);
}

} // namespace qsum
