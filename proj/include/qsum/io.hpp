#ifndef QSUM_IO_HPP
#define QSUM_IO_HPP

#include <string>

#include "json.hpp"
#include "qsum/certificate.hpp"

namespace qsum {

using Json = nlohmann::json;

Json field_to_json(const FieldSpec& f);
FieldSpec field_from_json(const Json& j);

Json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(const FieldSpec& f, const Json& j);

Json vec_to_json(const VectorFin& v);
VectorFin vec_from_json(const FieldSpec& f, const Json& j);

Json poly_to_json(const Polynomial& p);
Polynomial poly_from_json(const FieldSpec& f, const Json& j);

Json matrix_to_json(const MatrixFin& m);
MatrixFin matrix_from_json(const FieldSpec& f, const Json& j);

Json vecfamily_to_json(const VecFamily& fam);
VecFamily vecfamily_from_json(const FieldSpec& f, const Json& j);

Json op_to_json(const OpPtr& u);
OpPtr op_from_json(const FieldSpec& f, const Json& j);

Json strat_to_json(const StratPtr& s);
StratPtr strat_from_json(const FieldSpec& f, const Json& j);

Json certificate_to_json(const FieldSpec& f, const ThreeSumCertificate& cert);
ThreeSumCertificate certificate_from_json(const FieldSpec& f, const Json& j);

/// Operator job file: {"field": ..., "op": ..., optional "targets": [...]}.
struct JobFile {
    FieldSpec field;
    OpPtr op;
    std::optional<std::array<QuadraticTarget, 3>> targets;
};
JobFile job_from_json(const Json& j);
Json job_to_json(const JobFile& job);

/// Parses a CLI target list: three semicolon-separated coefficient lists
/// (lowest degree first), e.g. "0,0,1;0,-1,1;0,0,1". The shorthands "sq"
/// (t^2) and "idem" (t^2 - t) are accepted.
std::array<QuadraticTarget, 3> targets_from_string(const FieldSpec& f, const std::string& text);

} // namespace qsum

#endif
