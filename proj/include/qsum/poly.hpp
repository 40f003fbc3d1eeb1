#ifndef QSUM_POLY_HPP
#define QSUM_POLY_HPP

#include <string>
#include <vector>

#include "qsum/field.hpp"

namespace qsum {

/// Univariate polynomial, coefficients lowest degree first. The zero
/// polynomial has an empty coefficient list; otherwise the leading
/// coefficient is non-zero.
class Polynomial {
  public:
    explicit Polynomial(const FieldSpec& f) : field_(f) {}
    Polynomial(const FieldSpec& f, std::vector<Scalar> coeffs);

    static Polynomial zero(const FieldSpec& f) { return Polynomial(f); }
    static Polynomial constant(const Scalar& c);
    /// t - r
    static Polynomial linear_root(const Scalar& r);
    /// Builds from integer coefficients, lowest first.
    static Polynomial from_ints(const FieldSpec& f, const std::vector<long long>& coeffs);

    const FieldSpec& field() const { return field_; }
    const std::vector<Scalar>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; } // -1 for the zero polynomial
    Scalar coeff(int k) const;
    Scalar leading() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scaled(const Scalar& c) const;

    Scalar eval(const Scalar& x) const;
    /// p(t + shift), exact binomial expansion.
    Polynomial shifted_var(const Scalar& shift) const;

    /// Euclidean division by a non-zero divisor: returns (quotient, remainder).
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;
    /// Monic gcd (zero polynomial if both are zero).
    static Polynomial gcd(Polynomial a, Polynomial b);

    bool operator==(const Polynomial& o) const { return field_ == o.field_ && c_ == o.c_; }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    std::string str() const;

  private:
    void trim();

    FieldSpec field_;
    std::vector<Scalar> c_;
};

/// Divides by the leading coefficient. Throws ZeroPolynomial.
Polynomial monicize(const Polynomial& p);

/// Trace of the monicized polynomial: the opposite of its second-highest
/// coefficient. Throws ConstantPolynomial.
Scalar poly_trace(const Polynomial& p);

} // namespace qsum

#endif
