#include "qsum/matrix.hpp"

#include <sstream>

#include "qsum/errors.hpp"

namespace qsum {

MatrixFin MatrixFin::identity(const FieldSpec& f, Index n) {
    MatrixFin m(f, n);
    for (Index i = 0; i < n; ++i) m.set(i, i, Scalar::one(f));
    return m;
}

MatrixFin MatrixFin::operator+(const MatrixFin& o) const {
    require_same_field(field_, o.field_);
    if (n_ != o.n_) throw Error("matrix size mismatch");
    MatrixFin r(field_, n_);
    for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] + o.e_[k];
    return r;
}

MatrixFin MatrixFin::operator-(const MatrixFin& o) const {
    require_same_field(field_, o.field_);
    if (n_ != o.n_) throw Error("matrix size mismatch");
    MatrixFin r(field_, n_);
    for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] - o.e_[k];
    return r;
}

MatrixFin MatrixFin::operator*(const MatrixFin& o) const {
    require_same_field(field_, o.field_);
    if (n_ != o.n_) throw Error("matrix size mismatch");
    MatrixFin r(field_, n_);
    for (Index i = 0; i < n_; ++i)
        for (Index k = 0; k < n_; ++k) {
            const Scalar& a = at(i, k);
            if (a.is_zero()) continue;
            for (Index j = 0; j < n_; ++j) {
                const Scalar& b = o.at(k, j);
                if (b.is_zero()) continue;
                r.set(i, j, r.at(i, j) + a * b);
            }
        }
    return r;
}

MatrixFin MatrixFin::scaled(const Scalar& c) const {
    MatrixFin r(field_, n_);
    for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] * c;
    return r;
}

VectorFin MatrixFin::column(Index j) const {
    VectorFin v(field_);
    for (Index i = 0; i < n_; ++i) v.set(i, at(i, j));
    return v;
}

Scalar MatrixFin::trace() const {
    Scalar t = Scalar::zero(field_);
    for (Index i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

bool MatrixFin::is_zero() const {
    for (const auto& v : e_)
        if (!v.is_zero()) return false;
    return true;
}

MatrixFin MatrixFin::padded(Index q, const Scalar& lambda) const {
    MatrixFin r(field_, n_ + q);
    for (Index i = 0; i < n_; ++i)
        for (Index j = 0; j < n_; ++j) r.set(i, j, at(i, j));
    for (Index i = n_; i < n_ + q; ++i) r.set(i, i, lambda);
    return r;
}

std::string MatrixFin::str() const {
    std::ostringstream os;
    os << "[";
    for (Index i = 0; i < n_; ++i) {
        os << "[";
        for (Index j = 0; j < n_; ++j) {
            os << at(i, j).str();
            if (j + 1 < n_) os << ",";
        }
        os << "]";
        if (i + 1 < n_) os << ",";
    }
    os << "]";
    return os.str();
}

MatrixFin eval_poly_mat(const Polynomial& p, const MatrixFin& m) {
    require_same_field(p.field(), m.field());
    MatrixFin acc = MatrixFin::zero(m.field(), m.size());
    for (int k = p.degree(); k >= 0; --k) {
        acc = acc * m;
        Scalar c = p.coeff(k);
        if (!c.is_zero()) acc = acc + MatrixFin::identity(m.field(), m.size()).scaled(c);
    }
    return acc;
}

std::vector<VectorFin> mat_kernel(const MatrixFin& m) {
    const FieldSpec& f = m.field();
    Index n = m.size();
    // row echelon on a working copy, tracking pivot columns
    std::vector<std::vector<Scalar>> rows(static_cast<std::size_t>(n),
                                          std::vector<Scalar>(static_cast<std::size_t>(n), Scalar::zero(f)));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m.at(i, j);
    std::vector<Index> pivot_col;
    Index r = 0;
    for (Index c = 0; c < n && r < n; ++c) {
        Index pr = -1;
        for (Index i = r; i < n; ++i)
            if (!rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].is_zero()) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(rows[static_cast<std::size_t>(r)], rows[static_cast<std::size_t>(pr)]);
        Scalar inv = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].inverse();
        for (Index j = 0; j < n; ++j) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] *= inv;
        for (Index i = 0; i < n; ++i) {
            if (i == r) continue;
            Scalar factor = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            if (factor.is_zero()) continue;
            for (Index j = 0; j < n; ++j)
                rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
                    factor * rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
        }
        pivot_col.push_back(c);
        ++r;
    }
    std::vector<VectorFin> kernel;
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (Index c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
    for (Index c = 0; c < n; ++c) {
        if (is_pivot[static_cast<std::size_t>(c)]) continue;
        VectorFin v(f);
        v.set(c, Scalar::one(f));
        for (Index i = 0; i < static_cast<Index>(pivot_col.size()); ++i)
            v.set(pivot_col[static_cast<std::size_t>(i)], -rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
        kernel.push_back(std::move(v));
    }
    return kernel;
}

Polynomial charpoly(const MatrixFin& m) {
    // Hessenberg reduction then the standard recurrence on leading principal
    // minors of tI - H.
    const FieldSpec& f = m.field();
    Index n = m.size();
    if (n == 0) return Polynomial(f, {Scalar::one(f)});
    MatrixFin h = m;
    for (Index j = 0; j + 2 < n; ++j) {
        Index pivot = -1;
        for (Index i = j + 1; i < n; ++i)
            if (!h.at(i, j).is_zero()) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != j + 1) {
            for (Index k = 0; k < n; ++k) {
                Scalar tmp = h.at(j + 1, k);
                h.set(j + 1, k, h.at(pivot, k));
                h.set(pivot, k, tmp);
            }
            for (Index k = 0; k < n; ++k) {
                Scalar tmp = h.at(k, j + 1);
                h.set(k, j + 1, h.at(k, pivot));
                h.set(k, pivot, tmp);
            }
        }
        Scalar inv = h.at(j + 1, j).inverse();
        for (Index i = j + 2; i < n; ++i) {
            Scalar factor = h.at(i, j) * inv;
            if (factor.is_zero()) continue;
            for (Index k = 0; k < n; ++k) h.set(i, k, h.at(i, k) - factor * h.at(j + 1, k));
            for (Index k = 0; k < n; ++k) h.set(k, j + 1, h.at(k, j + 1) + factor * h.at(k, i));
        }
    }
    // p_0 = 1, p_k = (t - h[k-1][k-1]) p_{k-1} - sum over trailing products
    std::vector<Polynomial> p;
    p.push_back(Polynomial(f, {Scalar::one(f)}));
    for (Index k = 1; k <= n; ++k) {
        Polynomial term = Polynomial(f, {-h.at(k - 1, k - 1), Scalar::one(f)}) * p[static_cast<std::size_t>(k - 1)];
        Scalar prod = Scalar::one(f);
        for (Index i = 1; i < k; ++i) {
            prod = prod * h.at(k - i, k - i - 1);
            Scalar c = h.at(k - i - 1, k - 1) * prod;
            if (!c.is_zero()) term = term - p[static_cast<std::size_t>(k - i - 1)].scaled(c);
        }
        p.push_back(term);
    }
    return p.back();
}

std::vector<std::pair<Scalar, int>> field_roots(const Polynomial& p) {
    if (p.is_zero()) throw ZeroPolynomial();
    const FieldSpec& f = p.field();
    std::vector<std::pair<Scalar, int>> roots;
    auto try_root = [&](const Scalar& r, Polynomial& work) {
        int mult = 0;
        while (!work.is_zero() && work.degree() >= 1 && work.eval(r).is_zero()) {
            work = work.divmod(Polynomial::linear_root(r)).first;
            ++mult;
        }
        if (mult > 0) roots.emplace_back(r, mult);
    };
    Polynomial work = monicize(p);
    if (f.kind == FieldKind::PrimeField) {
        for (std::int64_t v = 0; v < f.characteristic; ++v) try_root(Scalar::of_int(f, v), work);
        return roots;
    }
    // rational root theorem on the integer-scaled polynomial
    Int scale = 1;
    for (const auto& c : p.coeffs()) scale = boost::multiprecision::lcm(scale, c.den());
    std::vector<Int> ic;
    for (const auto& c : p.coeffs()) ic.push_back(c.num() * (scale / c.den()));
    while (!ic.empty() && ic.back() == 0) ic.pop_back();
    if (ic.empty()) throw ZeroPolynomial();
    // strip powers of t
    std::size_t low = 0;
    while (low < ic.size() && ic[low] == 0) ++low;
    if (low > 0) try_root(Scalar::zero(f), work);
    Int a0 = ic[low] < 0 ? Int(-ic[low]) : ic[low];
    Int an = ic.back() < 0 ? Int(-ic.back()) : ic.back();
    auto divisors = [](const Int& n) {
        std::vector<Int> ds;
        for (Int d = 1; d * d <= n; ++d)
            if (n % d == 0) {
                ds.push_back(d);
                if (d * d != n) ds.push_back(n / d);
            }
        return ds;
    };
    for (const Int& num : divisors(a0))
        for (const Int& den : divisors(an)) {
            try_root(Scalar::fraction(f, num, den), work);
            try_root(Scalar::fraction(f, -num, den), work);
        }
    return roots;
}

} // namespace qsum
