#ifndef QSUM_OP_HPP
#define QSUM_OP_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "qsum/poly.hpp"
#include "qsum/vec.hpp"

namespace qsum {

struct Op;
using OpPtr = std::shared_ptr<const Op>;

/// Lazily enumerated family of (basis vector, image) pairs defining an
/// operator on a structural basis of V. Enumeration order is fixed and
/// deterministic; the basis vectors must be linearly independent and must
/// triangularly exhaust every basis prefix eventually.
class BasisFamily {
  public:
    virtual ~BasisFamily() = default;
    virtual const FieldSpec& field() const = 0;
    virtual std::pair<VectorFin, VectorFin> at(std::size_t i) const = 0;
    virtual std::string kind() const = 0;
};

using FamilyPtr = std::shared_ptr<const BasisFamily>;

/// One periodic band: column n receives pattern[n % period] * e_{n+offset}.
struct BandEntry {
    Index offset = 0;
    std::vector<Scalar> pattern;
};

struct PeriodicBands {
    Index period = 1;
    std::vector<BandEntry> bands;
};

/// Eventually periodic column rule: explicit exceptional columns below
/// `start`, then bands applied with residue (n - start) % period.
struct TailRule {
    Index start = 0;
    PeriodicBands bands;
};

enum class OpKind {
    Shift,
    DownShift,
    DiagPeriodic,
    Banded,
    Companion,
    Patch,
    DirectSum,
    ScalarId,
    Sum,
    Diff,
    Scale,
    Compose,
    RuleTable,
    Mapped,
};

struct ShiftData {};
struct DownShiftData {};
struct DiagPeriodicData {
    std::vector<Scalar> pattern;
};
struct BandedData {
    PeriodicBands bands;
};
struct CompanionData {
    std::vector<Polynomial> cycle; // monic, degree >= 1, tiled over N
};
struct PatchData {
    OpPtr base;
    std::map<Index, VectorFin> columns; // overridden columns
};
struct DirectSumData {
    OpPtr left;  // acts on even-indexed copy, k <-> 2k
    OpPtr right; // odd-indexed copy, k <-> 2k+1
};
struct ScalarIdData {
    Scalar value;
};
struct BinaryData {
    OpPtr a, b;
};
struct ScaleData {
    Scalar c;
    OpPtr a;
};
struct RuleTableData {
    std::map<Index, VectorFin> exceptions;
    TailRule tail;
};
struct MappedData {
    FamilyPtr family;
};

using OpData = std::variant<ShiftData, DownShiftData, DiagPeriodicData, BandedData, CompanionData, PatchData,
                            DirectSumData, ScalarIdData, BinaryData, ScaleData, RuleTableData, MappedData>;

/// Translation invariance witness: for all n >= start,
/// column(n + stride) = column(n) translated by stride, and
/// supp(column(n)) is contained in [n+lo, n+hi].
struct Invariance {
    Index start = 0;
    Index stride = 1;
    Index lo = 0;
    Index hi = 0;
};

struct MappedEvalState; // defined in op.cpp

/// Immutable finite description of a column-finite endomorphism. Columns are
/// evaluated lazily and memoized; memoization is semantically invisible.
struct Op {
    OpKind kind;
    FieldSpec field;
    OpData data;

    Op(OpKind k, const FieldSpec& f, OpData d) : kind(k), field(f), data(std::move(d)) {}

    mutable std::mutex memo_mu;
    mutable std::map<Index, VectorFin> memo_cols;
    mutable std::shared_ptr<MappedEvalState> mapped_state;
};

// constructors
OpPtr make_shift(const FieldSpec& f);
OpPtr make_downshift(const FieldSpec& f);
OpPtr make_diag_periodic(std::vector<Scalar> pattern);
OpPtr make_banded(const FieldSpec& f, PeriodicBands bands);
OpPtr make_companion_sum(std::vector<Polynomial> cycle);
OpPtr make_patch(OpPtr base, std::map<Index, VectorFin> columns);
OpPtr make_direct_sum(OpPtr left, OpPtr right);
OpPtr make_scalar_id(const Scalar& value);
OpPtr make_rule_table(const FieldSpec& f, std::map<Index, VectorFin> exceptions, TailRule tail);
OpPtr make_mapped(FamilyPtr family);

OpPtr op_add(OpPtr a, OpPtr b);
OpPtr op_sub(OpPtr a, OpPtr b);
OpPtr op_scale(const Scalar& c, OpPtr a);
OpPtr op_compose(OpPtr a, OpPtr b); // a after b

/// Exact column u(e_n).
VectorFin op_column(const OpPtr& u, Index n);
/// Exact image of a finitely supported vector; linear in x.
VectorFin apply(const OpPtr& u, const VectorFin& x);
/// Exact p(u)(x) by Horner evaluation on columns.
VectorFin eval_poly_vec(const Polynomial& p, const OpPtr& u, const VectorFin& x);

struct AnnihilationReport {
    bool pass = false;
    Index prefix = 0;
    std::optional<Index> first_fail;
};

/// Checks p(u)(e_n) = 0 for all n < prefix.
AnnihilationReport verify_annihilated(const OpPtr& u, const Polynomial& p, Index prefix);

/// Structural translation invariance, when the tree shape exposes one.
std::optional<Invariance> op_invariance(const OpPtr& u);

/// Sound global equality test: compares columns up to the bound implied by
/// both invariance witnesses. nullopt when either side has no witness.
std::optional<bool> op_equal_structural(const OpPtr& a, const OpPtr& b);

/// Verifies that an operator identity holds globally: given z with a
/// structural invariance witness, checks that all columns of z vanish by
/// testing the finite prefix the witness bounds. nullopt without a witness.
std::optional<bool> op_is_zero_structural(const OpPtr& z);

} // namespace qsum

#endif
