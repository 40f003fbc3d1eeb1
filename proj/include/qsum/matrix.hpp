#ifndef QSUM_MATRIX_HPP
#define QSUM_MATRIX_HPP

#include <vector>

#include "qsum/poly.hpp"
#include "qsum/vec.hpp"

namespace qsum {

/// Dense square matrix with exact entries, row-major.
class MatrixFin {
  public:
    MatrixFin(const FieldSpec& f, Index n) : field_(f), n_(n), e_(static_cast<std::size_t>(n * n), Scalar::zero(f)) {}

    static MatrixFin identity(const FieldSpec& f, Index n);
    static MatrixFin zero(const FieldSpec& f, Index n) { return MatrixFin(f, n); }

    const FieldSpec& field() const { return field_; }
    Index size() const { return n_; }

    const Scalar& at(Index i, Index j) const { return e_[static_cast<std::size_t>(i * n_ + j)]; }
    void set(Index i, Index j, const Scalar& v) { e_[static_cast<std::size_t>(i * n_ + j)] = v; }

    MatrixFin operator+(const MatrixFin& o) const;
    MatrixFin operator-(const MatrixFin& o) const;
    MatrixFin operator*(const MatrixFin& o) const;
    MatrixFin scaled(const Scalar& c) const;

    VectorFin column(Index j) const;
    Scalar trace() const;
    bool is_zero() const;

    /// Direct sum with q extra lambda-diagonal rows/columns.
    MatrixFin padded(Index q, const Scalar& lambda) const;

    bool operator==(const MatrixFin& o) const { return field_ == o.field_ && n_ == o.n_ && e_ == o.e_; }
    bool operator!=(const MatrixFin& o) const { return !(*this == o); }

    std::string str() const;

  private:
    FieldSpec field_;
    Index n_;
    std::vector<Scalar> e_;
};

MatrixFin eval_poly_mat(const Polynomial& p, const MatrixFin& m);

/// Basis of the kernel, as coordinate vectors over indices 0..n-1.
std::vector<VectorFin> mat_kernel(const MatrixFin& m);

/// Characteristic polynomial via Hessenberg reduction; exact over any field.
Polynomial charpoly(const MatrixFin& m);

/// Roots of p lying in its ground field, with multiplicities, found exactly
/// (residue scan over F_p, rational-root test over Q).
std::vector<std::pair<Scalar, int>> field_roots(const Polynomial& p);

} // namespace qsum

#endif
