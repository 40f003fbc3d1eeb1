#ifndef QSUM_ERRORS_HPP
#define QSUM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qsum {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct FieldMismatch : Error {
    explicit FieldMismatch(const std::string& what = "operands belong to different fields") : Error(what) {}
};
struct ZeroPolynomial : Error {
    explicit ZeroPolynomial(const std::string& what = "zero polynomial") : Error(what) {}
};
struct ConstantPolynomial : Error {
    explicit ConstantPolynomial(const std::string& what = "constant polynomial has no trace") : Error(what) {}
};
struct WrongDegree : Error {
    explicit WrongDegree(const std::string& what = "polynomial has the wrong degree") : Error(what) {}
};
struct NotSplit : Error {
    explicit NotSplit(const std::string& what = "polynomial does not split over the ground field") : Error(what) {}
};
struct WrongCharacteristic : Error {
    explicit WrongCharacteristic(const std::string& what = "field has the wrong characteristic") : Error(what) {}
};
struct ConditionViolated : Error {
    explicit ConditionViolated(const std::string& what) : Error(what) {}
};
struct PropertyViolated : Error {
    explicit PropertyViolated(const std::string& what) : Error(what) {}
};
struct NotQuadratic : Error {
    explicit NotQuadratic(const std::string& what = "operator carries no annihilating quadratic") : Error(what) {}
};
struct NotFreeOnPrefix : Error {
    explicit NotFreeOnPrefix(const std::string& what) : Error(what) {}
};
struct SpanGapOnPrefix : Error {
    explicit SpanGapOnPrefix(const std::string& what) : Error(what) {}
};
struct PreconditionUnverifiable : Error {
    explicit PreconditionUnverifiable(const std::string& what) : Error(what) {}
};
struct CapExceeded : Error {
    explicit CapExceeded(const std::string& what) : Error(what) {}
};
struct SearchFailed : Error {
    explicit SearchFailed(const std::string& what) : Error(what) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace qsum

#endif
