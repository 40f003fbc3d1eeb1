#include "qsum/io.hpp"

#include <sstream>

#include "qsum/errors.hpp"

namespace qsum {

Json field_to_json(const FieldSpec& f) {
    if (f.kind == FieldKind::Rationals) return Json{{"kind", "Q"}};
    return Json{{"kind", "Fp"}, {"p", f.characteristic}};
}

FieldSpec field_from_json(const Json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "Q") return FieldSpec::rationals();
    if (kind == "Fp") return FieldSpec::prime(j.at("p").get<std::int64_t>());
    throw ParseError("unknown field kind '" + kind + "'");
}

Json scalar_to_json(const Scalar& s) { return s.str(); }

Scalar scalar_from_json(const FieldSpec& f, const Json& j) {
    if (j.is_number_integer()) return Scalar::of_int(f, j.get<std::int64_t>());
    return parse_scalar(f, j.get<std::string>());
}

Json vec_to_json(const VectorFin& v) {
    Json j = Json::object();
    for (const auto& [i, c] : v.entries()) j[std::to_string(i)] = c.str();
    return j;
}

VectorFin vec_from_json(const FieldSpec& f, const Json& j) {
    VectorFin v(f);
    for (auto it = j.begin(); it != j.end(); ++it) v.set(std::stoll(it.key()), scalar_from_json(f, it.value()));
    return v;
}

Json poly_to_json(const Polynomial& p) {
    Json j = Json::array();
    for (const auto& c : p.coeffs()) j.push_back(c.str());
    return j;
}

Polynomial poly_from_json(const FieldSpec& f, const Json& j) {
    std::vector<Scalar> coeffs;
    for (const auto& c : j) coeffs.push_back(scalar_from_json(f, c));
    return Polynomial(f, std::move(coeffs));
}

Json matrix_to_json(const MatrixFin& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.size(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.size(); ++j) row.push_back(m.at(i, j).str());
        rows.push_back(row);
    }
    return rows;
}

MatrixFin matrix_from_json(const FieldSpec& f, const Json& j) {
    Index n = static_cast<Index>(j.size());
    MatrixFin m(f, n);
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k)
            m.set(i, k, scalar_from_json(f, j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k))));
    return m;
}

Json vecfamily_to_json(const VecFamily& fam) {
    Json j;
    Json head = Json::array();
    for (const auto& v : fam.head()) head.push_back(vec_to_json(v));
    j["head"] = head;
    if (!fam.tails().empty()) {
        Json tails = Json::array();
        for (const auto& t : fam.tails()) tails.push_back(Json{{"pattern", vec_to_json(t.pattern)}, {"stride", t.stride}});
        j["tails"] = tails;
    }
    if (fam.cofinite()) {
        Json ex = Json::array();
        for (Index i : fam.cofinite()->excluded) ex.push_back(i);
        j["cofinite"] = Json{{"excluded", ex}};
    }
    return j;
}

VecFamily vecfamily_from_json(const FieldSpec& f, const Json& j) {
    std::vector<VectorFin> head;
    for (const auto& v : j.at("head")) head.push_back(vec_from_json(f, v));
    if (j.contains("cofinite")) {
        std::set<Index> excluded;
        for (const auto& e : j.at("cofinite").at("excluded")) excluded.insert(e.get<Index>());
        return VecFamily::cofinite_units(f, std::move(excluded), std::move(head));
    }
    std::vector<VecFamily::ArithTail> tails;
    if (j.contains("tails"))
        for (const auto& t : j.at("tails"))
            tails.push_back(VecFamily::ArithTail{vec_from_json(f, t.at("pattern")), t.at("stride").get<Index>()});
    if (tails.empty()) return VecFamily::explicit_list(f, std::move(head));
    return VecFamily::with_tails(f, std::move(head), std::move(tails));
}

namespace {

Json bands_to_json(const PeriodicBands& b) {
    Json bands = Json::array();
    for (const auto& band : b.bands) {
        Json pattern = Json::array();
        for (const auto& c : band.pattern) pattern.push_back(c.str());
        bands.push_back(Json{{"offset", band.offset}, {"pattern", pattern}});
    }
    return Json{{"period", b.period}, {"bands", bands}};
}

PeriodicBands bands_from_json(const FieldSpec& f, const Json& j) {
    PeriodicBands b;
    b.period = j.at("period").get<Index>();
    for (const auto& band : j.at("bands")) {
        BandEntry e;
        e.offset = band.at("offset").get<Index>();
        for (const auto& c : band.at("pattern")) e.pattern.push_back(scalar_from_json(f, c));
        b.bands.push_back(std::move(e));
    }
    return b;
}

Json family_to_json(const FamilyPtr& fam);
FamilyPtr family_from_json(const FieldSpec& f, const Json& j);

Json chain_rule_to_json(const ChainBandedFamily::Rule& r) {
    Json images = Json::array();
    for (const auto& moves : r.images) {
        Json m = Json::array();
        for (const auto& [off, c] : moves) m.push_back(Json::array({off, c.str()}));
        images.push_back(m);
    }
    return Json{{"period", r.period}, {"images", images}};
}

ChainBandedFamily::Rule chain_rule_from_json(const FieldSpec& f, const Json& j) {
    ChainBandedFamily::Rule r;
    r.period = j.at("period").get<Index>();
    for (const auto& m : j.at("images")) {
        std::vector<std::pair<Index, Scalar>> moves;
        for (const auto& mv : m) moves.emplace_back(mv.at(0).get<Index>(), scalar_from_json(f, mv.at(1)));
        r.images.push_back(std::move(moves));
    }
    return r;
}

Json family_to_json(const FamilyPtr& fam) {
    Json j;
    j["kind"] = fam->kind();
    if (auto* e = dynamic_cast<const ExplicitPairsFamily*>(fam.get())) {
        Json pairs = Json::array();
        for (const auto& [b, img] : e->pairs()) pairs.push_back(Json::array({vec_to_json(b), vec_to_json(img)}));
        j["pairs"] = pairs;
        return j;
    }
    if (auto* z = dynamic_cast<const ZeroChainsFamily*>(fam.get())) {
        j["carrier"] = op_to_json(z->cache().carrier());
        j["gens"] = vecfamily_to_json(z->cache().gens());
        return j;
    }
    if (auto* cb = dynamic_cast<const ChainBandedFamily*>(fam.get())) {
        j["carrier"] = op_to_json(cb->cache().carrier());
        j["shift"] = cb->cache().shift().str();
        j["gens"] = vecfamily_to_json(cb->cache().gens());
        j["rule"] = chain_rule_to_json(cb->rule());
        return j;
    }
    if (auto* cr = dynamic_cast<const ChainReflectFamily*>(fam.get())) {
        j["carrier"] = op_to_json(cr->cache().carrier());
        j["shift"] = cr->cache().shift().str();
        j["gens"] = vecfamily_to_json(cr->cache().gens());
        j["alpha"] = cr->alpha().str();
        j["lambda"] = cr->lambda().str();
        j["beta"] = cr->beta().str();
        j["mu"] = cr->mu().str();
        j["sigma"] = cr->sigma().str();
        return j;
    }
    if (auto* s = dynamic_cast<const SewingFamily*>(fam.get())) {
        j["carrier"] = op_to_json(s->cache().carrier());
        j["lambda"] = s->lambda().str();
        j["a"] = s->a().str();
        j["x"] = vec_to_json(s->x());
        j["v2"] = vecfamily_to_json(s->v2());
        return j;
    }
    if (auto* p = dynamic_cast<const PairTiledFamily*>(fam.get())) {
        j["units"] = vecfamily_to_json(p->units());
        j["block"] = matrix_to_json(p->block());
        return j;
    }
    if (auto* d = dynamic_cast<const DiagFamily*>(fam.get())) {
        j["units"] = vecfamily_to_json(d->units());
        j["value"] = d->value().str();
        return j;
    }
    if (auto* c = dynamic_cast<const CompositeFamily*>(fam.get())) {
        Json parts = Json::array(), sizes = Json::array();
        for (const auto& part : c->parts()) parts.push_back(family_to_json(part));
        for (const auto& s : c->sizes()) {
            if (s)
                sizes.push_back(*s);
            else
                sizes.push_back(nullptr);
        }
        j["parts"] = parts;
        j["sizes"] = sizes;
        return j;
    }
    if (auto* sc = dynamic_cast<const StratConnectorFamily*>(fam.get())) {
        j["strat"] = strat_to_json(sc->strat());
        j["a"] = sc->a().str();
        return j;
    }
    throw Error("unserializable family kind '" + fam->kind() + "'");
}

FamilyPtr family_from_json(const FieldSpec& f, const Json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "explicit_pairs") {
        std::vector<std::pair<VectorFin, VectorFin>> pairs;
        for (const auto& p : j.at("pairs"))
            pairs.emplace_back(vec_from_json(f, p.at(0)), vec_from_json(f, p.at(1)));
        return std::make_shared<ExplicitPairsFamily>(f, std::move(pairs));
    }
    if (kind == "zero_chains")
        return std::make_shared<ZeroChainsFamily>(op_from_json(f, j.at("carrier")),
                                                  vecfamily_from_json(f, j.at("gens")));
    if (kind == "chain_banded")
        return std::make_shared<ChainBandedFamily>(op_from_json(f, j.at("carrier")),
                                                   scalar_from_json(f, j.at("shift")),
                                                   vecfamily_from_json(f, j.at("gens")),
                                                   chain_rule_from_json(f, j.at("rule")));
    if (kind == "chain_reflect")
        return std::make_shared<ChainReflectFamily>(
            op_from_json(f, j.at("carrier")), scalar_from_json(f, j.at("shift")),
            vecfamily_from_json(f, j.at("gens")), scalar_from_json(f, j.at("alpha")),
            scalar_from_json(f, j.at("lambda")), scalar_from_json(f, j.at("beta")), scalar_from_json(f, j.at("mu")),
            scalar_from_json(f, j.at("sigma")));
    if (kind == "sewing")
        return std::make_shared<SewingFamily>(op_from_json(f, j.at("carrier")), scalar_from_json(f, j.at("lambda")),
                                              scalar_from_json(f, j.at("a")), vec_from_json(f, j.at("x")),
                                              vecfamily_from_json(f, j.at("v2")));
    if (kind == "pair_tiled")
        return std::make_shared<PairTiledFamily>(vecfamily_from_json(f, j.at("units")),
                                                 matrix_from_json(f, j.at("block")));
    if (kind == "diag_family")
        return std::make_shared<DiagFamily>(vecfamily_from_json(f, j.at("units")),
                                            scalar_from_json(f, j.at("value")));
    if (kind == "composite") {
        std::vector<FamilyPtr> parts;
        std::vector<std::optional<std::size_t>> sizes;
        for (const auto& p : j.at("parts")) parts.push_back(family_from_json(f, p));
        for (const auto& s : j.at("sizes")) {
            if (s.is_null())
                sizes.push_back(std::nullopt);
            else
                sizes.push_back(s.get<std::size_t>());
        }
        return std::make_shared<CompositeFamily>(f, std::move(parts), std::move(sizes));
    }
    if (kind == "strat_connector")
        return std::make_shared<StratConnectorFamily>(strat_from_json(f, j.at("strat")),
                                                      scalar_from_json(f, j.at("a")));
    throw ParseError("unknown family kind '" + kind + "'");
}

} // namespace

Json op_to_json(const OpPtr& u) {
    Json j;
    switch (u->kind) {
        case OpKind::Shift:
            j["kind"] = "shift";
            return j;
        case OpKind::DownShift:
            j["kind"] = "downshift";
            return j;
        case OpKind::DiagPeriodic: {
            j["kind"] = "diag_periodic";
            Json pattern = Json::array();
            for (const auto& c : std::get<DiagPeriodicData>(u->data).pattern) pattern.push_back(c.str());
            j["pattern"] = pattern;
            return j;
        }
        case OpKind::Banded:
            j["kind"] = "banded";
            j["bands"] = bands_to_json(std::get<BandedData>(u->data).bands);
            return j;
        case OpKind::Companion: {
            j["kind"] = "companion_sum";
            Json cycle = Json::array();
            for (const auto& p : std::get<CompanionData>(u->data).cycle) cycle.push_back(poly_to_json(p));
            j["cycle"] = cycle;
            return j;
        }
        case OpKind::Patch: {
            const auto& d = std::get<PatchData>(u->data);
            j["kind"] = "patch";
            j["base"] = op_to_json(d.base);
            Json cols = Json::object();
            for (const auto& [i, v] : d.columns) cols[std::to_string(i)] = vec_to_json(v);
            j["columns"] = cols;
            return j;
        }
        case OpKind::DirectSum: {
            const auto& d = std::get<DirectSumData>(u->data);
            j["kind"] = "direct_sum";
            j["left"] = op_to_json(d.left);
            j["right"] = op_to_json(d.right);
            return j;
        }
        case OpKind::ScalarId:
            j["kind"] = "scalar_id";
            j["value"] = std::get<ScalarIdData>(u->data).value.str();
            return j;
        case OpKind::Sum:
        case OpKind::Diff:
        case OpKind::Compose: {
            const auto& d = std::get<BinaryData>(u->data);
            j["kind"] = u->kind == OpKind::Sum ? "sum" : (u->kind == OpKind::Diff ? "diff" : "compose");
            j["a"] = op_to_json(d.a);
            j["b"] = op_to_json(d.b);
            return j;
        }
        case OpKind::Scale: {
            const auto& d = std::get<ScaleData>(u->data);
            j["kind"] = "scale";
            j["c"] = d.c.str();
            j["a"] = op_to_json(d.a);
            return j;
        }
        case OpKind::RuleTable: {
            const auto& d = std::get<RuleTableData>(u->data);
            j["kind"] = "rule_table";
            Json exc = Json::object();
            for (const auto& [i, v] : d.exceptions) exc[std::to_string(i)] = vec_to_json(v);
            j["exceptions"] = exc;
            j["tail"] = Json{{"start", d.tail.start}, {"rule", bands_to_json(d.tail.bands)}};
            return j;
        }
        case OpKind::Mapped:
            j["kind"] = "mapped";
            j["family"] = family_to_json(std::get<MappedData>(u->data).family);
            return j;
    }
    throw Error("unreachable operator kind");
}

OpPtr op_from_json(const FieldSpec& f, const Json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "shift") return make_shift(f);
    if (kind == "downshift") return make_downshift(f);
    if (kind == "diag_periodic") {
        std::vector<Scalar> pattern;
        for (const auto& c : j.at("pattern")) pattern.push_back(scalar_from_json(f, c));
        return make_diag_periodic(std::move(pattern));
    }
    if (kind == "banded") return make_banded(f, bands_from_json(f, j.at("bands")));
    if (kind == "companion_sum") {
        std::vector<Polynomial> cycle;
        for (const auto& p : j.at("cycle")) cycle.push_back(poly_from_json(f, p));
        return make_companion_sum(std::move(cycle));
    }
    if (kind == "patch") {
        std::map<Index, VectorFin> cols;
        for (auto it = j.at("columns").begin(); it != j.at("columns").end(); ++it)
            cols.emplace(std::stoll(it.key()), vec_from_json(f, it.value()));
        return make_patch(op_from_json(f, j.at("base")), std::move(cols));
    }
    if (kind == "direct_sum") return make_direct_sum(op_from_json(f, j.at("left")), op_from_json(f, j.at("right")));
    if (kind == "scalar_id") return make_scalar_id(scalar_from_json(f, j.at("value")));
    if (kind == "sum") return op_add(op_from_json(f, j.at("a")), op_from_json(f, j.at("b")));
    if (kind == "diff") return op_sub(op_from_json(f, j.at("a")), op_from_json(f, j.at("b")));
    if (kind == "compose") return op_compose(op_from_json(f, j.at("a")), op_from_json(f, j.at("b")));
    if (kind == "scale") return op_scale(scalar_from_json(f, j.at("c")), op_from_json(f, j.at("a")));
    if (kind == "rule_table") {
        std::map<Index, VectorFin> exc;
        for (auto it = j.at("exceptions").begin(); it != j.at("exceptions").end(); ++it)
            exc.emplace(std::stoll(it.key()), vec_from_json(f, it.value()));
        TailRule tail;
        tail.start = j.at("tail").at("start").get<Index>();
        tail.bands = bands_from_json(f, j.at("tail").at("rule"));
        return make_rule_table(f, std::move(exc), std::move(tail));
    }
    if (kind == "mapped") return make_mapped(family_from_json(f, j.at("family")));
    throw ParseError("unknown operator kind '" + kind + "'");
}

Json strat_to_json(const StratPtr& s) {
    Json j;
    if (auto* nat = dynamic_cast<const NatStrat*>(s.get())) {
        j["kind"] = "nat";
        j["op"] = op_to_json(nat->op());
        Json strata = Json::array();
        for (const auto& st : nat->strata()) strata.push_back(Json{{"gen", vec_to_json(st.gen)}, {"dim", st.dim}});
        j["strata"] = strata;
        if (nat->tail())
            j["tail"] = Json{{"block_begin", nat->tail()->block_begin}, {"stride", nat->tail()->stride}};
        return j;
    }
    if (auto* grid = dynamic_cast<const GridStrat*>(s.get())) {
        j["kind"] = "grid";
        j["op"] = op_to_json(grid->op());
        j["kernels"] = vecfamily_to_json(grid->kernels());
        j["chains"] = vecfamily_to_json(grid->chains());
        j["chain_dim"] = grid->chain_dim();
        return j;
    }
    if (auto* tower = dynamic_cast<const TowerStrat*>(s.get())) {
        j["kind"] = "tower";
        j["lower"] = strat_to_json(tower->lower());
        j["upper"] = strat_to_json(tower->upper());
        return j;
    }
    throw Error("unserializable stratification kind '" + s->kind() + "'");
}

StratPtr strat_from_json(const FieldSpec& f, const Json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "nat") {
        OpPtr op = op_from_json(f, j.at("op"));
        std::vector<Stratum> strata;
        for (const auto& st : j.at("strata"))
            strata.push_back(Stratum{vec_from_json(f, st.at("gen")), st.at("dim").get<Index>()});
        std::optional<NatStrat::Tail> tail;
        if (j.contains("tail"))
            tail = NatStrat::Tail{j.at("tail").at("block_begin").get<std::size_t>(),
                                  j.at("tail").at("stride").get<Index>()};
        return std::make_shared<NatStrat>(op, std::move(strata), tail);
    }
    if (kind == "grid") {
        OpPtr op = op_from_json(f, j.at("op"));
        return std::make_shared<GridStrat>(op, vecfamily_from_json(f, j.at("kernels")),
                                           vecfamily_from_json(f, j.at("chains")), j.at("chain_dim").get<Index>());
    }
    if (kind == "tower")
        return std::make_shared<TowerStrat>(strat_from_json(f, j.at("lower")), strat_from_json(f, j.at("upper")));
    throw ParseError("unknown stratification kind '" + kind + "'");
}

Json certificate_to_json(const FieldSpec& f, const ThreeSumCertificate& cert) {
    Json j;
    j["format"] = "qsum-cert-v1";
    j["field"] = field_to_json(f);
    Json targets = Json::array();
    for (const auto& t : cert.targets) targets.push_back(poly_to_json(t.monic));
    j["targets"] = targets;
    j["prefix"] = cert.verified_prefix;
    j["route"] = cert.route;
    Json summands = Json::array();
    for (const auto& s : cert.summands) summands.push_back(op_to_json(s));
    j["summands"] = summands;
    Json sub = Json::object();
    if (cert.sub.strat) sub["strat"] = strat_to_json(cert.sub.strat);
    if (cert.sub.elementary_gens) sub["elementary_gens"] = vecfamily_to_json(*cert.sub.elementary_gens);
    if (cert.sub.connector_index) sub["connector_index"] = *cert.sub.connector_index;
    if (cert.sub.witness) {
        Json w = Json::array();
        for (const auto& m : *cert.sub.witness) w.push_back(matrix_to_json(m));
        sub["witness"] = w;
        sub["witness_q"] = *cert.sub.witness_q;
    }
    if (cert.sub.scalar_witness) {
        Json parts = Json::array();
        for (const auto& p : cert.sub.scalar_witness->parts) parts.push_back(p.str());
        sub["scalar_witness"] = parts;
    }
    if (cert.sub.tiles) {
        sub["tiles"] = Json::array(
            {matrix_to_json(cert.sub.tiles->a), matrix_to_json(cert.sub.tiles->b), matrix_to_json(cert.sub.tiles->c)});
    }
    j["sub"] = sub;
    return j;
}

ThreeSumCertificate certificate_from_json(const FieldSpec& f, const Json& j) {
    if (j.at("format").get<std::string>() != "qsum-cert-v1") throw ParseError("unknown certificate format");
    FieldSpec ff = field_from_json(j.at("field"));
    require_same_field(f, ff);
    ThreeSumCertificate cert;
    for (int i = 0; i < 3; ++i)
        cert.targets[static_cast<std::size_t>(i)] =
            split_quadratic(poly_from_json(f, j.at("targets").at(static_cast<std::size_t>(i))));
    cert.verified_prefix = j.at("prefix").get<Index>();
    cert.route = j.at("route").get<std::string>();
    for (int i = 0; i < 3; ++i)
        cert.summands[static_cast<std::size_t>(i)] = op_from_json(f, j.at("summands").at(static_cast<std::size_t>(i)));
    const Json& sub = j.at("sub");
    if (sub.contains("strat")) cert.sub.strat = strat_from_json(f, sub.at("strat"));
    if (sub.contains("elementary_gens")) cert.sub.elementary_gens = vecfamily_from_json(f, sub.at("elementary_gens"));
    if (sub.contains("connector_index")) cert.sub.connector_index = sub.at("connector_index").get<int>();
    if (sub.contains("witness")) {
        std::array<MatrixFin, 3> w = {MatrixFin::zero(f, 0), MatrixFin::zero(f, 0), MatrixFin::zero(f, 0)};
        for (int i = 0; i < 3; ++i) w[static_cast<std::size_t>(i)] = matrix_from_json(f, sub.at("witness").at(static_cast<std::size_t>(i)));
        cert.sub.witness = w;
        cert.sub.witness_q = sub.at("witness_q").get<Index>();
    }
    return cert;
}

JobFile job_from_json(const Json& j) {
    JobFile job{field_from_json(j.at("field")), nullptr, std::nullopt};
    job.op = op_from_json(job.field, j.at("op"));
    if (j.contains("targets")) {
        std::array<QuadraticTarget, 3> t = {split_quadratic(poly_from_json(job.field, j.at("targets").at(0))),
                                            split_quadratic(poly_from_json(job.field, j.at("targets").at(1))),
                                            split_quadratic(poly_from_json(job.field, j.at("targets").at(2)))};
        job.targets = t;
    }
    return job;
}

Json job_to_json(const JobFile& job) {
    Json j;
    j["field"] = field_to_json(job.field);
    j["op"] = op_to_json(job.op);
    if (job.targets) {
        Json targets = Json::array();
        for (const auto& t : *job.targets) targets.push_back(poly_to_json(t.monic));
        j["targets"] = targets;
    }
    return j;
}

std::array<QuadraticTarget, 3> targets_from_string(const FieldSpec& f, const std::string& text) {
    std::vector<Polynomial> polys;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        if (part == "sq" || part == "t2" || part == "t^2") {
            polys.push_back(Polynomial::from_ints(f, {0, 0, 1}));
        } else if (part == "idem" || part == "t2-t" || part == "t^2-t") {
            polys.push_back(Polynomial::from_ints(f, {0, -1, 1}));
        } else {
            std::vector<Scalar> coeffs;
            std::stringstream cs(part);
            std::string tok;
            while (std::getline(cs, tok, ',')) coeffs.push_back(parse_scalar(f, tok));
            polys.push_back(Polynomial(f, std::move(coeffs)));
        }
    }
    if (polys.size() != 3) throw ParseError("expected exactly three targets, got " + std::to_string(polys.size()));
    return {split_quadratic(polys[0]), split_quadratic(polys[1]), split_quadratic(polys[2])};
}

} // namespace qsum
