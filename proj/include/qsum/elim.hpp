#ifndef QSUM_ELIM_HPP
#define QSUM_ELIM_HPP

#include <map>
#include <optional>
#include <vector>

#include "qsum/vec.hpp"

namespace qsum {

/// Incremental exact Gaussian elimination in reduced row-echelon form,
/// pivoting on the smallest support index. Each row remembers its expression
/// over the inserted vectors, so membership tests come with exact
/// coordinates.
class Eliminator {
  public:
    explicit Eliminator(const FieldSpec& f) : field_(f) {}

    /// Inserts the next vector of the tracked family. Returns false (and
    /// discards it) when it is dependent on the rows already present.
    bool insert(const VectorFin& v);

    std::size_t rank() const { return rows_.size(); }
    std::size_t inserted() const { return inserted_; }

    /// Residual of v modulo the current span.
    VectorFin reduce(const VectorFin& v) const;
    bool contains(const VectorFin& v) const { return reduce(v).is_zero(); }

    /// Coordinates of v over the inserted (independent) vectors, if v lies in
    /// the span. Keys are insertion positions of the vectors that were kept.
    std::optional<std::map<std::size_t, Scalar>> express(const VectorFin& v) const;

    /// True iff the span is exactly Vect(e_0, ..., e_{p-1}).
    bool spans_exact_prefix(Index p) const;

    const std::vector<Index>& pivots() const { return pivot_list_; }

  private:
    struct Row {
        VectorFin vec;                        // reduced, pivot coefficient 1
        std::map<std::size_t, Scalar> expr;   // vec = sum expr[j] * family[j]
        Index pivot;
        Row(VectorFin v, std::map<std::size_t, Scalar> e, Index p)
            : vec(std::move(v)), expr(std::move(e)), pivot(p) {}
    };

    FieldSpec field_;
    std::vector<Row> rows_;          // unsorted; pivot lookup via map
    std::map<Index, std::size_t> by_pivot_;
    std::vector<Index> pivot_list_;
    std::size_t inserted_ = 0;
};

} // namespace qsum

#endif
