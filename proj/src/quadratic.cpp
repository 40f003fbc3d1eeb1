#include "qsum/quadratic.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>

namespace qsum {

namespace {

std::optional<Int> exact_sqrt(const Int& n) {
    if (n < 0) return std::nullopt;
    Int r = boost::multiprecision::sqrt(n);
    if (r * r != n) return std::nullopt;
    return r;
}

// exact square root of a reduced non-negative rational, if it is a square
std::optional<Scalar> rational_sqrt(const Scalar& s) {
    auto rn = exact_sqrt(s.num());
    if (!rn) return std::nullopt;
    auto rd = exact_sqrt(s.den());
    if (!rd) return std::nullopt;
    return Scalar::fraction(s.field(), *rn, *rd);
}

QuadraticTarget make_target(const Polynomial& monic, Scalar r1, Scalar r2) {
    if (r2 < r1) std::swap(r1, r2);
    return QuadraticTarget{monic, r1, r2, r1 + r2};
}

} // namespace

QuadraticTarget split_quadratic(const Polynomial& p) {
    if (p.degree() != 2) throw WrongDegree("expected degree 2, got " + std::to_string(p.degree()));
    Polynomial m = monicize(p);
    const FieldSpec& f = m.field();
    Scalar b = m.coeff(1), c = m.coeff(0);

    if (f.kind == FieldKind::PrimeField) {
        // exhaustive scan; p is small at desk scale and this sidesteps the
        // characteristic-2 quadratic-formula pitfall
        std::optional<Scalar> first;
        for (std::int64_t r = 0; r < f.characteristic; ++r) {
            Scalar x = Scalar::of_int(f, r);
            if (m.eval(x).is_zero()) {
                if (!first) {
                    first = x;
                } else {
                    return make_target(m, *first, x);
                }
            }
        }
        if (first) {
            // double root: verify (t - r)^2 == m
            Polynomial sq = Polynomial::linear_root(*first) * Polynomial::linear_root(*first);
            if (sq == m) return make_target(m, *first, *first);
        }
        throw NotSplit("no roots of " + m.str() + " in " + f.str());
    }

    // over Q: discriminant with exact integer square-root testing
    Scalar four = Scalar::of_int(f, 4);
    Scalar two = Scalar::of_int(f, 2);
    Scalar disc = b * b - four * c;
    auto root = rational_sqrt(disc);
    if (!root) throw NotSplit("discriminant " + disc.str() + " is not a rational square");
    Scalar r1 = (-b - *root) / two;
    Scalar r2 = (-b + *root) / two;
    return make_target(m, r1, r2);
}

QuadraticTarget shifted_target(const Scalar& a) {
    const FieldSpec& f = a.field();
    Polynomial m(f, {Scalar::zero(f), -a, Scalar::one(f)});
    Scalar z = Scalar::zero(f);
    Scalar r1 = z, r2 = a;
    if (r2 < r1) std::swap(r1, r2);
    return QuadraticTarget{m, r1, r2, a};
}

std::pair<Scalar, std::array<Scalar, 3>> canonical_shift(const std::array<QuadraticTarget, 3>& t) {
    require_same_field(t[0].field(), t[1].field());
    require_same_field(t[0].field(), t[2].field());
    Scalar c = t[0].x + t[1].x + t[2].x;
    return {c, {t[0].gap(), t[1].gap(), t[2].gap()}};
}

} // namespace qsum
