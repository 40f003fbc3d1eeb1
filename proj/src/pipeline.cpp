#include "qsum/pipeline.hpp"

#include "qsum/elementary_split.hpp"
#include "qsum/errors.hpp"

namespace qsum {

std::string route_name(Route r) {
    switch (r) {
        case Route::NoDominant_Torsion: return "NoDominant_Torsion";
        case Route::NoDominant_NonTorsion: return "NoDominant_NonTorsion";
        case Route::FiniteRank: return "FiniteRank";
        case Route::Scalar: return "Scalar";
        case Route::Refused: return "Refused";
        case Route::Unresolved: return "Unresolved";
    }
    return "?";
}

namespace {

bool targets_all_squarezero(const std::array<QuadraticTarget, 3>& t) {
    for (const auto& q : t)
        if (!q.x.is_zero() || !q.y.is_zero()) return false;
    return true;
}

bool targets_all_idempotent(const std::array<QuadraticTarget, 3>& t) {
    for (const auto& q : t) {
        if (!q.x.is_zero() || !q.y.is_one()) return false;
    }
    return true;
}

Scalar deviation_trace(const OpPtr& u, const Scalar& lambda, Index bound) {
    Scalar tr = Scalar::zero(u->field);
    for (Index j = 0; j < bound; ++j) {
        VectorFin col = op_column(u, j);
        tr += col.coeff(j) - lambda;
    }
    return tr;
}

} // namespace

ClassificationReport classify(const OpPtr& u, const std::array<QuadraticTarget, 3>& targets) {
    const FieldSpec& f = u->field;
    for (const auto& t : targets) require_same_field(f, t.field());
    OperatorClassTags tags = classify_structure(u);
    ClassificationReport rep;
    rep.torsion = tags.is_torsion;

    if (tags.deviation_rank_finite == TriState::Unknown) {
        rep.route = Route::Unresolved;
        rep.reason = "the structure tree does not determine whether a dominant eigenvalue exists";
        return rep;
    }

    if (tags.deviation_rank_finite == TriState::No) {
        if (tags.is_torsion == TriState::Yes) {
            rep.route = Route::NoDominant_Torsion;
        } else if (tags.is_torsion == TriState::No) {
            rep.route = Route::NoDominant_NonTorsion;
        } else {
            rep.route = Route::Unresolved;
            rep.reason = "torsion structure unknown";
        }
        return rep;
    }

    Scalar lambda = *tags.dominant_candidate;
    rep.dominant = lambda;
    auto bound = finite_deviation_bound(u, lambda);
    if (!bound) {
        rep.route = Route::Unresolved;
        rep.reason = "deviation bound not readable from the structure";
        return rep;
    }
    rep.deviation_bound = *bound;
    Scalar w_trace = deviation_trace(u, lambda, *bound);
    bool deviation_zero = true;
    for (Index j = 0; j < *bound && deviation_zero; ++j) {
        VectorFin col = op_column(u, j);
        col.axpy(-lambda, VectorFin::unit(f, j));
        if (!col.is_zero()) deviation_zero = false;
    }

    if (targets_all_squarezero(targets)) {
        // the three-square-zero theorem, conditions (i) and (ii)
        if (f.characteristic != 2 && !lambda.is_zero()) {
            rep.route = Route::Refused;
            rep.reason = "non-zero dominant eigenvalue";
            return rep;
        }
        if (w_trace != Scalar::zero(f) && w_trace != lambda) {
            rep.route = Route::Refused;
            rep.reason = "finite rank and non-zero trace";
            if (f.characteristic == 2) rep.reason = "u - lambda id has finite rank and trace outside {0, lambda}";
            return rep;
        }
    } else if (targets_all_idempotent(targets) && f.characteristic == 2) {
        // the three-idempotents theorem over characteristic 2
        if (!lambda.is_zero() && !lambda.is_one()) {
            rep.route = Route::Refused;
            rep.reason = "dominant eigenvalue outside {0,1}";
            return rep;
        }
        if (!w_trace.is_zero() && !w_trace.is_one()) {
            rep.route = Route::Refused;
            rep.reason = "u - lambda id has finite rank and trace outside {0,1}";
            return rep;
        }
    } else {
        if (!scalar_is_sum(lambda, targets) && !trace_condition(lambda, targets)) {
            rep.route = Route::Refused;
            rep.reason = "lambda is not a (p1,p2,p3)-sum and 2*lambda = tr p1 + tr p2 + tr p3 fails";
            return rep;
        }
    }

    rep.route = deviation_zero ? Route::Scalar : Route::FiniteRank;
    return rep;
}

namespace {

// order the three targets so the two handled by the elementary split admit a
// closed form whenever possible
int pick_connector_index(const FieldSpec& f, const std::array<Scalar, 3>& gaps) {
    for (int k = 0; k < 3; ++k) {
        int i = k == 0 ? 1 : 0;
        int j = k == 2 ? 1 : 2;
        if (split_pair_has_closed_form(f, gaps[static_cast<std::size_t>(i)], gaps[static_cast<std::size_t>(j)]))
            return k;
    }
    return 0;
}

void verify_or_throw(const OpPtr& u, const ThreeSumCertificate& cert) {
    VerifyReport rep = verify_certificate(u, cert);
    if (!rep.pass) throw Error("internal: emitted certificate failed verification: " + rep.detail);
}

} // namespace

ThreeSumCertificate decompose_three(const OpPtr& u, const std::array<QuadraticTarget, 3>& targets, Index prefix,
                                    const Budgets& budgets) {
    const FieldSpec& f = u->field;
    ClassificationReport rep = classify(u, targets);
    if (rep.route == Route::Refused) throw ConditionViolated(rep.reason);
    if (rep.route == Route::Unresolved) throw PreconditionUnverifiable(rep.reason);

    if (rep.route == Route::Scalar) {
        ScalarIdentityDecomposition sd = scalar_identity_decomposition(*rep.dominant, targets);
        ThreeSumCertificate cert;
        cert.summands = sd.summands;
        cert.targets = targets;
        cert.verified_prefix = prefix;
        cert.route = route_name(Route::Scalar);
        cert.sub.scalar_witness = sd.witness;
        cert.sub.tiles = sd.tiles;
        verify_or_throw(u, cert);
        return cert;
    }

    if (rep.route == Route::FiniteRank) {
        ThreeSumCertificate cert = finite_rank_decompose(u, targets, budgets.q_max, prefix);
        verify_or_throw(u, cert);
        return cert;
    }

    // no dominant eigenvalue: canonical shift, connector / assembly, then the
    // elementary two-split
    auto [c, gaps] = canonical_shift(targets);
    OpPtr u_c = c.is_zero() ? u : op_sub(u, make_scalar_id(c));
    int k = pick_connector_index(f, gaps);
    int i = k == 0 ? 1 : 0;
    int j = k == 2 ? 1 : 2;

    OpPtr v;
    VecFamily gens = VecFamily::empty(f);
    SubCertificates sub;
    if (rep.route == Route::NoDominant_Torsion) {
        StratPtr strat = torsion_good_strat(u_c, budgets.strat_budget);
        PropertyFlags fl = strat->flags();
        if (!fl.good()) throw Error("internal: torsion builder produced a non-good stratification");
        v = connector(strat, gaps[static_cast<std::size_t>(k)]);
        gens = strat->elementary_generators();
        sub.strat = strat;
    } else {
        NonTorsionSplit split = nontorsion_decompose(u_c);
        AElementary ae = assemble_a_elementary(u_c, split, gaps[static_cast<std::size_t>(k)]);
        v = ae.v;
        gens = ae.gens;
    }

    OpPtr u_elem = op_sub(u_c, v);
    verify_elementary(u_elem, gens, std::min<Index>(prefix, 256));

    // the remaining pair must sum to u_elem + (x_i + x_j) id
    Scalar xi = targets[static_cast<std::size_t>(i)].x, xj = targets[static_cast<std::size_t>(j)].x;
    OpPtr pair_target = (xi + xj).is_zero() ? u_elem : op_add(u_elem, make_scalar_id(xi + xj));
    TwoSplit ab = split_elementary(pair_target, gens, targets[static_cast<std::size_t>(i)],
                                   targets[static_cast<std::size_t>(j)], std::min<Index>(prefix, 64),
                                   budgets.search_budget);

    ThreeSumCertificate cert;
    cert.targets = targets;
    cert.verified_prefix = prefix;
    cert.route = route_name(rep.route);
    Scalar xk = targets[static_cast<std::size_t>(k)].x;
    cert.summands[static_cast<std::size_t>(k)] = xk.is_zero() ? v : op_add(v, make_scalar_id(xk));
    cert.summands[static_cast<std::size_t>(i)] = ab.a;
    cert.summands[static_cast<std::size_t>(j)] = ab.b;
    cert.sub = sub;
    cert.sub.elementary_gens = gens;
    cert.sub.connector_index = k;
    verify_or_throw(u, cert);
    return cert;
}

VerifyReport verify_certificate(const OpPtr& u, const ThreeSumCertificate& cert,
                                std::optional<Index> prefix_override) {
    const FieldSpec& f = u->field;
    Index prefix = prefix_override.value_or(cert.verified_prefix);
    VerifyReport rep;
    for (Index n = 0; n < prefix; ++n) {
        VectorFin e = VectorFin::unit(f, n);
        VectorFin total(f);
        for (const auto& s : cert.summands) total = total + op_column(s, n);
        if (total != op_column(u, n)) {
            rep.detail = "sum identity fails at column " + std::to_string(n);
            rep.failing_column = n;
            return rep;
        }
        for (int i = 0; i < 3; ++i) {
            if (!eval_poly_vec(cert.targets[static_cast<std::size_t>(i)].monic,
                               cert.summands[static_cast<std::size_t>(i)], e)
                     .is_zero()) {
                rep.detail = "p" + std::to_string(i + 1) + " annihilation fails at column " + std::to_string(n);
                rep.failing_column = n;
                return rep;
            }
        }
    }
    if (cert.sub.strat) {
        PropertyFlags fl = cert.sub.strat->flags();
        if (!fl.good()) {
            rep.detail = "stratification sub-certificate is not good";
            return rep;
        }
    }
    if (cert.sub.elementary_gens && cert.sub.connector_index) {
        int k = *cert.sub.connector_index;
        Scalar xk = cert.targets[static_cast<std::size_t>(k)].x;
        Scalar other = cert.targets[0].x + cert.targets[1].x + cert.targets[2].x - xk;
        OpPtr u_elem = op_sub(u, cert.summands[static_cast<std::size_t>(k)]);
        if (!other.is_zero()) u_elem = op_sub(u_elem, make_scalar_id(other));
        try {
            verify_elementary(u_elem, *cert.sub.elementary_gens, std::min<Index>(prefix, 128));
        } catch (const Error& e) {
            rep.detail = std::string("elementary sub-certificate failed: ") + e.what();
            return rep;
        }
    }
    rep.pass = true;
    rep.detail = "verified on prefix " + std::to_string(prefix);
    return rep;
}

LC3Result lc3(const OpPtr& u, const std::optional<std::array<Scalar, 3>>& coefficients, Index prefix,
              const Budgets& budgets) {
    const FieldSpec& f = u->field;
    Scalar one = Scalar::one(f);
    OperatorClassTags tags = classify_structure(u);

    std::vector<std::array<Scalar, 3>> splittings;
    if (coefficients) {
        splittings.push_back(*coefficients);
    } else if (tags.deviation_rank_finite == TriState::Yes) {
        Scalar lambda = *tags.dominant_candidate;
        Scalar two = Scalar::of_int(f, 2);
        splittings.push_back({one, one, lambda - two});
        splittings.push_back({lambda, one, -one});
        splittings.push_back({lambda - one, one, Scalar::zero(f)});
    } else {
        splittings.push_back({one, one, one});
    }

    std::string last_reason = "no splitting attempted";
    for (const auto& a : splittings) {
        std::array<QuadraticTarget, 3> targets = {
            a[0].is_zero() ? split_quadratic(Polynomial::from_ints(f, {0, -1, 1})) : shifted_target(a[0]),
            a[1].is_zero() ? split_quadratic(Polynomial::from_ints(f, {0, -1, 1})) : shifted_target(a[1]),
            a[2].is_zero() ? split_quadratic(Polynomial::from_ints(f, {0, -1, 1})) : shifted_target(a[2]),
        };
        try {
            ThreeSumCertificate cert = decompose_three(u, targets, prefix, budgets);
            LC3Result out{{one, one, one}, {nullptr, nullptr, nullptr}, cert};
            for (int i = 0; i < 3; ++i) {
                const Scalar& ai = a[static_cast<std::size_t>(i)];
                if (ai.is_zero()) {
                    // the summand is annihilated by t^2 - t, hence idempotent
                    out.coefficients[static_cast<std::size_t>(i)] = one;
                    out.idempotents[static_cast<std::size_t>(i)] = cert.summands[static_cast<std::size_t>(i)];
                } else {
                    out.coefficients[static_cast<std::size_t>(i)] = ai;
                    out.idempotents[static_cast<std::size_t>(i)] =
                        op_scale(ai.inverse(), cert.summands[static_cast<std::size_t>(i)]);
                }
            }
            return out;
        } catch (const ConditionViolated& e) {
            last_reason = e.what();
        } catch (const SearchFailed& e) {
            last_reason = e.what();
        } catch (const CapExceeded& e) {
            last_reason = e.what();
        } catch (const PreconditionUnverifiable& e) {
            last_reason = e.what();
        }
    }
    throw SearchFailed("lc3 unresolved: " + last_reason);
}

} // namespace qsum
