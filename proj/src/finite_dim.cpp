#include "qsum/finite_dim.hpp"

#include <cstdint>
#include <map>
#include <mutex>

#include "qsum/elim.hpp"
#include "qsum/errors.hpp"

namespace qsum {

std::vector<VectorFin> invariant_closure(const std::vector<VectorFin>& w_basis, const OpPtr& a, const OpPtr& b,
                                         const OpPtr& c) {
    if (w_basis.empty()) return {};
    const FieldSpec& f = w_basis.front().field();
    std::array<OpPtr, 3> ops = {a, b, c};
    Eliminator elim(f);
    std::vector<VectorFin> basis;
    auto add = [&](const VectorFin& v) {
        if (elim.insert(v)) basis.push_back(v);
    };
    for (const auto& w : w_basis) add(w);
    for (const auto& w : w_basis)
        for (const auto& e : ops) add(apply(e, w));
    for (const auto& w : w_basis)
        for (const auto& e : ops)
            for (const auto& g : ops) add(apply(e, apply(g, w)));
    // stability under each operator, by exact membership
    for (const auto& v : basis)
        for (const auto& e : ops)
            if (!elim.contains(apply(e, v)))
                throw NotQuadratic("closure is not stable; the declared quadratic hypotheses fail");
    return basis;
}

namespace {

struct RankData {
    Scalar lambda;
    Index bound;
    std::vector<std::pair<Index, VectorFin>> w_cols; // non-zero columns of w = u - lambda id
    std::vector<VectorFin> basis;                    // minimal W: im(w) then completion units
};

RankData rank_data(const OpPtr& u) {
    OperatorClassTags tags = classify_structure(u);
    if (!tags.dominant_candidate || tags.deviation_rank_finite != TriState::Yes)
        throw PreconditionUnverifiable("structure does not expose u = lambda id + finite rank");
    Scalar lambda = *tags.dominant_candidate;
    auto bound = finite_deviation_bound(u, lambda);
    if (!bound) throw PreconditionUnverifiable("finite deviation bound not readable from the structure");
    RankData d{lambda, *bound, {}, {}};
    const FieldSpec& f = u->field;
    for (Index j = 0; j < d.bound; ++j) {
        VectorFin c = op_column(u, j);
        c.axpy(-lambda, VectorFin::unit(f, j));
        if (!c.is_zero()) d.w_cols.emplace_back(j, c);
    }
    if (d.w_cols.empty()) return d;

    auto w_of = [&](const VectorFin& v) {
        VectorFin img = apply(u, v);
        img.axpy(-lambda, v);
        return img;
    };

    Eliminator im_elim(f);
    std::vector<VectorFin> im_basis;
    for (const auto& [j, c] : d.w_cols)
        if (im_elim.insert(c)) im_basis.push_back(c);

    // completion: w(W) must reach all of im(w); start from w(im w)
    Eliminator have(f);
    for (const auto& y : im_basis) have.insert(w_of(y));
    Eliminator w_span(f);
    for (const auto& y : im_basis) w_span.insert(y);
    d.basis = im_basis;
    for (const auto& [j, c] : d.w_cols) {
        if (have.rank() == im_basis.size()) break;
        if (have.insert(c)) {
            VectorFin e = VectorFin::unit(f, j);
            if (w_span.insert(e)) d.basis.push_back(e);
        }
    }
    return d;
}

MatrixFin compression(const OpPtr& u, const RankData& d, bool of_w) {
    const FieldSpec& f = u->field;
    Index n = static_cast<Index>(d.basis.size());
    Eliminator coords(f);
    for (const auto& b : d.basis) coords.insert(b);
    MatrixFin m(f, n);
    for (Index j = 0; j < n; ++j) {
        VectorFin img = apply(u, d.basis[static_cast<std::size_t>(j)]);
        if (of_w) img.axpy(-d.lambda, d.basis[static_cast<std::size_t>(j)]);
        auto expr = coords.express(img);
        if (!expr) throw Error("minimal W is not invariant");
        for (const auto& [tag, c] : *expr) m.set(static_cast<Index>(tag), j, c);
    }
    return m;
}

// ---- small prime-field enumeration ----

using SmallMat = std::vector<std::uint8_t>;

SmallMat small_mul(const SmallMat& a, const SmallMat& b, Index n, int p) {
    SmallMat r(static_cast<std::size_t>(n * n), 0);
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k) {
            int av = a[static_cast<std::size_t>(i * n + k)];
            if (!av) continue;
            for (Index j = 0; j < n; ++j) {
                int bv = b[static_cast<std::size_t>(k * n + j)];
                if (!bv) continue;
                auto& cell = r[static_cast<std::size_t>(i * n + j)];
                cell = static_cast<std::uint8_t>((cell + av * bv) % p);
            }
        }
    return r;
}

bool small_quad_ok(const SmallMat& x, Index n, int p, int tau, int delta) {
    SmallMat sq = small_mul(x, x, n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            int want = (tau * x[static_cast<std::size_t>(i * n + j)]) % p;
            if (i == j) want = (want - delta % p + p * p) % p;
            if (sq[static_cast<std::size_t>(i * n + j)] != want % p) return false;
        }
    return true;
}

const std::vector<SmallMat>& annihilated_matrices(int p, Index n, int tau, int delta) {
    static std::mutex mu;
    static std::map<std::tuple<int, Index, int, int>, std::vector<SmallMat>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(p, n, tau, delta);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    double count = 1;
    for (Index i = 0; i < n * n; ++i) count *= p;
    if (count > 8e6) throw SearchFailed("enumeration space too large for the exhaustive backend");

    std::vector<SmallMat> out;
    SmallMat x(static_cast<std::size_t>(n * n), 0);
    for (;;) {
        if (small_quad_ok(x, n, p, tau, delta)) out.push_back(x);
        std::size_t pos = 0;
        while (pos < x.size()) {
            if (++x[pos] < p) break;
            x[pos] = 0;
            ++pos;
        }
        if (pos == x.size()) break;
    }
    return cache.emplace(key, std::move(out)).first->second;
}

SmallMat to_small(const MatrixFin& m, int p) {
    SmallMat r(static_cast<std::size_t>(m.size() * m.size()), 0);
    for (Index i = 0; i < m.size(); ++i)
        for (Index j = 0; j < m.size(); ++j) {
            const Scalar& s = m.at(i, j);
            r[static_cast<std::size_t>(i * m.size() + j)] = static_cast<std::uint8_t>((s.num() % p).convert_to<int>());
        }
    return r;
}

MatrixFin from_small(const SmallMat& x, Index n, const FieldSpec& f) {
    MatrixFin m(f, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m.set(i, j, Scalar::of_int(f, x[static_cast<std::size_t>(i * n + j)]));
    return m;
}

// staggered square-zero pair along the Jordan chains of a nilpotent matrix
std::optional<std::array<MatrixFin, 3>> nilpotent_tiling(const MatrixFin& m) {
    const FieldSpec& f = m.field();
    Index n = m.size();
    MatrixFin power = m;
    for (Index i = 1; i < n; ++i) power = power * m;
    if (!power.is_zero()) return std::nullopt;

    FiniteModuleSplit fm = finite_module_split(m, Scalar::zero(f));
    // collect all chains: blocks have dim >= 2, eigen are singleton chains
    std::vector<std::vector<VectorFin>> chains;
    for (const auto& blk : fm.blocks) {
        std::vector<VectorFin> chain;
        chain.push_back(blk.gen);
        for (Index k = 1; k < blk.dim; ++k) {
            VectorFin next(f);
            for (const auto& [j, c] : chain.back().entries()) next.axpy(c, m.column(j));
            chain.push_back(next);
        }
        chains.push_back(chain);
    }
    for (const auto& e : fm.eigen) chains.push_back({e});

    Eliminator coords(f);
    std::vector<VectorFin> basis;
    for (const auto& ch : chains)
        for (const auto& v : ch) {
            if (!coords.insert(v)) return std::nullopt;
            basis.push_back(v);
        }
    if (static_cast<Index>(basis.size()) != n) return std::nullopt;

    // A maps even chain positions up, B the odd ones; in standard
    // coordinates A = P C P^{-1} with P the chain basis
    MatrixFin pmat(f, n);
    {
        Index col = 0;
        for (const auto& ch : chains)
            for (const auto& v : ch) {
                for (const auto& [i, c] : v.entries()) pmat.set(i, col, c);
                ++col;
            }
    }
    // chain-coordinate images
    MatrixFin ca(f, n), cb(f, n);
    {
        Index col = 0;
        for (const auto& ch : chains) {
            for (std::size_t k = 0; k < ch.size(); ++k) {
                if (k + 1 < ch.size()) {
                    if (k % 2 == 0)
                        ca.set(col + 1, col, Scalar::one(f));
                    else
                        cb.set(col + 1, col, Scalar::one(f));
                }
                ++col;
            }
        }
    }
    // P^{-1} via elimination
    Eliminator pinv_elim(f);
    for (Index j = 0; j < n; ++j) pinv_elim.insert(pmat.column(j));
    MatrixFin pinv(f, n);
    for (Index j = 0; j < n; ++j) {
        auto expr = pinv_elim.express(VectorFin::unit(f, j));
        if (!expr) return std::nullopt;
        for (const auto& [tag, c] : *expr) pinv.set(static_cast<Index>(tag), j, c);
    }
    MatrixFin a_std = pmat * ca * pinv;
    MatrixFin b_std = pmat * cb * pinv;
    return std::array<MatrixFin, 3>{a_std, b_std, MatrixFin::zero(f, n)};
}

bool all_targets_squarezero(const std::array<QuadraticTarget, 3>& t) {
    for (const auto& q : t)
        if (!q.x.is_zero() || !q.y.is_zero()) return false;
    return true;
}

} // namespace

std::pair<Scalar, FiniteRankClass> finite_rank_class(const OpPtr& u) {
    RankData d = rank_data(u);
    if (d.w_cols.empty())
        return {d.lambda, FiniteRankClass{MatrixFin::zero(u->field, 0), 0}};
    MatrixFin m = compression(u, d, /*of_w=*/true);
    return {d.lambda, FiniteRankClass{m, static_cast<Index>(d.basis.size())}};
}

LambdaStableWitness lambda_stable_search(const MatrixFin& a, const Scalar& lambda,
                                         const std::array<QuadraticTarget, 3>& targets, Index q_max) {
    const FieldSpec& f = a.field();
    Index n = a.size();

    if (all_targets_squarezero(targets)) {
        // a square-zero matrix is nilpotent, so its trace vanishes: refuse
        // when no padding can zero the trace
        Scalar tr = a.trace() + lambda * Scalar::of_int(f, n);
        if (lambda.is_zero()) {
            if (!tr.is_zero())
                throw ConditionViolated("finite rank and non-zero trace (trace of a square-zero sum is zero)");
        } else if (f.kind == FieldKind::Rationals) {
            // tr + q lambda = 0 needs q = -tr/lambda, a non-negative integer
            Scalar q_needed = -(tr / lambda);
            if (q_needed.den() != 1 || q_needed.num() < 0)
                throw ConditionViolated("no padding makes the trace of the square-zero sum vanish");
        }
    }

    MatrixFin a_lam = a + MatrixFin::identity(f, n).scaled(lambda);
    for (Index q = 0; q <= q_max; ++q) {
        MatrixFin m = a_lam.padded(q, lambda);
        Index nn = n + q;
        if (all_targets_squarezero(targets) && !m.trace().is_zero()) continue;

        // scalar root combinations in every arrangement
        std::array<std::array<Scalar, 2>, 3> roots = {{{targets[0].x, targets[0].y},
                                                       {targets[1].x, targets[1].y},
                                                       {targets[2].x, targets[2].y}}};
        for (int hole = 0; hole < 3; ++hole) {
            int o1 = hole == 0 ? 1 : 0;
            int o2 = hole == 2 ? 1 : 2;
            for (int r1 = 0; r1 < 2; ++r1)
                for (int r2 = 0; r2 < 2; ++r2) {
                    Scalar x1 = roots[static_cast<std::size_t>(o1)][static_cast<std::size_t>(r1)];
                    Scalar x2 = roots[static_cast<std::size_t>(o2)][static_cast<std::size_t>(r2)];
                    MatrixFin rest = m - MatrixFin::identity(f, nn).scaled(x1 + x2);
                    if (eval_poly_mat(targets[static_cast<std::size_t>(hole)].monic, rest).is_zero()) {
                        std::array<MatrixFin, 3> parts = {MatrixFin::zero(f, nn), MatrixFin::zero(f, nn),
                                                          MatrixFin::zero(f, nn)};
                        parts[static_cast<std::size_t>(hole)] = rest;
                        parts[static_cast<std::size_t>(o1)] = MatrixFin::identity(f, nn).scaled(x1);
                        parts[static_cast<std::size_t>(o2)] = MatrixFin::identity(f, nn).scaled(x2);
                        return LambdaStableWitness{q, parts};
                    }
                }
        }

        if (all_targets_squarezero(targets)) {
            if (auto tiled = nilpotent_tiling(m)) return LambdaStableWitness{q, *tiled};
        }

        if (f.kind == FieldKind::PrimeField && f.characteristic <= 5) {
            int p = static_cast<int>(f.characteristic);
            auto tau_delta = [&](const QuadraticTarget& t) {
                int tau = (t.trace.num() % p).convert_to<int>();
                int delta = (t.constant().num() % p).convert_to<int>();
                return std::pair<int, int>{tau, delta};
            };
            try {
                auto [t1, d1] = tau_delta(targets[0]);
                auto [t2, d2] = tau_delta(targets[1]);
                auto [t3, d3] = tau_delta(targets[2]);
                const auto& ann1 = annihilated_matrices(p, nn, t1, d1);
                const auto& ann2 = annihilated_matrices(p, nn, t2, d2);
                double pair_count = static_cast<double>(ann1.size()) * static_cast<double>(ann2.size());
                if (pair_count <= 3e8) {
                    SmallMat ms = to_small(m, p);
                    for (const auto& m1 : ann1) {
                        SmallMat rest(ms.size());
                        for (std::size_t i = 0; i < ms.size(); ++i)
                            rest[i] = static_cast<std::uint8_t>((ms[i] + p - m1[i]) % p);
                        for (const auto& m2 : ann2) {
                            SmallMat m3(ms.size());
                            for (std::size_t i = 0; i < ms.size(); ++i)
                                m3[i] = static_cast<std::uint8_t>((rest[i] + p - m2[i]) % p);
                            if (small_quad_ok(m3, nn, p, t3, d3)) {
                                return LambdaStableWitness{
                                    q, {from_small(m1, nn, f), from_small(m2, nn, f), from_small(m3, nn, f)}};
                            }
                        }
                    }
                }
            } catch (const SearchFailed&) {
                // enumeration too large at this size; try larger padding or fail below
            }
        }
    }
    throw SearchFailed("no witness found for q in [0, " + std::to_string(q_max) + "]");
}

ThreeSumCertificate finite_rank_decompose(const OpPtr& u, const std::array<QuadraticTarget, 3>& targets,
                                          Index q_max, Index prefix) {
    const FieldSpec& f = u->field;
    RankData d = rank_data(u);
    Scalar lambda = d.lambda;

    if (!scalar_is_sum(lambda, targets) && !trace_condition(lambda, targets))
        throw ConditionViolated(
            "lambda is not a (p1,p2,p3)-sum and 2*lambda = tr p1 + tr p2 + tr p3 fails");

    ThreeSumCertificate cert;
    cert.targets = targets;
    cert.verified_prefix = prefix;
    cert.route = "FiniteRank";

    if (d.w_cols.empty()) {
        ScalarIdentityDecomposition sd = scalar_identity_decomposition(lambda, targets);
        cert.summands = sd.summands;
        cert.sub.scalar_witness = sd.witness;
        cert.sub.tiles = sd.tiles;
        return cert;
    }

    MatrixFin rep = compression(u, d, /*of_w=*/true);
    LambdaStableWitness wit = lambda_stable_search(rep, lambda, targets, q_max);

    // finite block basis: minimal W then q fresh eigenvectors
    Index cutoff = d.bound;
    for (const auto& b : d.basis) cutoff = std::max(cutoff, b.max_index() + 1);
    std::vector<VectorFin> block_basis = d.basis;
    for (Index j = 0; j < wit.q; ++j) block_basis.push_back(VectorFin::unit(f, cutoff + j));
    Index nn = static_cast<Index>(block_basis.size());

    // complement family (the scalar part lives there)
    std::set<Index> s_cols;
    for (const auto& [j, c] : d.w_cols) s_cols.insert(j);
    Eliminator total(f);
    for (const auto& b : block_basis) total.insert(b);
    std::vector<VectorFin> extras;
    {
        Eliminator cols_elim(f);
        std::vector<Index> inserted_cols;
        for (const auto& [j, c] : d.w_cols) {
            if (cols_elim.insert(c)) {
                inserted_cols.push_back(j);
            } else {
                auto expr = cols_elim.express(c);
                VectorFin k = VectorFin::unit(f, j);
                for (const auto& [tag, coef] : *expr) k.axpy(-coef, VectorFin::unit(f, inserted_cols[tag]));
                if (total.insert(k)) extras.push_back(k);
            }
        }
    }
    std::set<Index> excluded;
    Index probe_end = cutoff + wit.q;
    for (Index j = 0; j < probe_end; ++j) {
        if (s_cols.count(j)) {
            excluded.insert(j);
            continue;
        }
        VectorFin e = VectorFin::unit(f, j);
        if (!total.insert(e)) excluded.insert(j);
    }
    VecFamily rest = VecFamily::cofinite_units(f, excluded, extras);

    ScalarIdentityDecomposition sd = scalar_identity_decomposition(lambda, targets);

    for (int i = 0; i < 3; ++i) {
        std::vector<std::pair<VectorFin, VectorFin>> pairs;
        for (Index j = 0; j < nn; ++j) {
            VectorFin img(f);
            for (Index k = 0; k < nn; ++k) {
                const Scalar& c = wit.parts[static_cast<std::size_t>(i)].at(k, j);
                if (!c.is_zero()) img.axpy(c, block_basis[static_cast<std::size_t>(k)]);
            }
            pairs.emplace_back(block_basis[static_cast<std::size_t>(j)], img);
        }
        std::vector<FamilyPtr> parts;
        std::vector<std::optional<std::size_t>> sizes;
        parts.push_back(std::make_shared<ExplicitPairsFamily>(f, pairs));
        sizes.push_back(pairs.size());
        if (sd.diagonal) {
            parts.push_back(std::make_shared<DiagFamily>(rest, sd.witness->parts[static_cast<std::size_t>(i)]));
        } else {
            const MatrixFin& tile = i == 0 ? sd.tiles->a : (i == 1 ? sd.tiles->b : sd.tiles->c);
            parts.push_back(std::make_shared<PairTiledFamily>(rest, tile));
        }
        sizes.push_back(std::nullopt);
        cert.summands[static_cast<std::size_t>(i)] =
            make_mapped(std::make_shared<CompositeFamily>(f, parts, sizes));
    }
    cert.sub.witness = wit.parts;
    cert.sub.witness_q = wit.q;
    cert.sub.scalar_witness = sd.witness;
    cert.sub.tiles = sd.tiles;
    return cert;
}

} // namespace qsum
