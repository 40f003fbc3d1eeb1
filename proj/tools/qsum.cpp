// Batch front-end: classify / decompose / verify structured operators and
// emit machine-checkable certificates.
//
// Exit codes: 0 verified, 1 verification failure, 2 refused, 3 unresolved,
// 4 input error.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qsum/io.hpp"
#include "qsum/pipeline.hpp"

namespace {

using namespace qsum;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitRefused = 2;
constexpr int kExitUnresolved = 3;
constexpr int kExitInputError = 4;

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    Json j;
    in >> j;
    return j;
}

std::array<QuadraticTarget, 3> resolve_targets(const JobFile& job, const std::string& flag) {
    if (!flag.empty()) return targets_from_string(job.field, flag);
    if (job.targets) return *job.targets;
    throw ParseError("no targets: pass --targets or add them to the job file");
}

int cmd_classify(const std::string& file, const std::string& targets_flag) {
    JobFile job = job_from_json(read_json(file));
    std::array<QuadraticTarget, 3> targets = resolve_targets(job, targets_flag);
    ClassificationReport rep = classify(job.op, targets);
    std::cout << "field: " << job.field.str() << "\n";
    std::cout << "route: " << route_name(rep.route) << "\n";
    if (rep.dominant) std::cout << "dominant eigenvalue: " << rep.dominant->str() << "\n";
    if (rep.deviation_bound) std::cout << "deviation bound: " << *rep.deviation_bound << "\n";
    std::cout << "torsion: "
              << (rep.torsion == TriState::Yes ? "yes" : rep.torsion == TriState::No ? "no" : "unknown") << "\n";
    if (!rep.reason.empty()) std::cout << "reason: " << rep.reason << "\n";
    return kExitOk;
}

int cmd_decompose(const std::string& file, const std::string& targets_flag, Index prefix, Index q_max,
                  std::size_t budget, const std::string& out_path) {
    JobFile job = job_from_json(read_json(file));
    std::array<QuadraticTarget, 3> targets = resolve_targets(job, targets_flag);
    Budgets budgets;
    budgets.q_max = q_max;
    budgets.strat_budget = budget;
    budgets.search_budget = budget;
    try {
        ThreeSumCertificate cert = decompose_three(job.op, targets, prefix, budgets);
        Json out = certificate_to_json(job.field, cert);
        if (!out_path.empty()) {
            std::ofstream of(out_path);
            of << out.dump(1) << "\n";
        } else {
            std::cout << out.dump(1) << "\n";
        }
        std::cerr << "verified: route " << cert.route << ", prefix " << cert.verified_prefix << "\n";
        return kExitOk;
    } catch (const ConditionViolated& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kExitRefused;
    } catch (const SearchFailed& e) {
        std::cerr << "unresolved (backend limit): " << e.what() << "\n";
        return kExitUnresolved;
    } catch (const CapExceeded& e) {
        std::cerr << "unresolved (budget): " << e.what() << "\n";
        return kExitUnresolved;
    } catch (const PreconditionUnverifiable& e) {
        std::cerr << "unresolved: " << e.what() << "\n";
        return kExitUnresolved;
    }
}

int cmd_verify(const std::string& op_file, const std::string& cert_file, Index prefix) {
    JobFile job = job_from_json(read_json(op_file));
    ThreeSumCertificate cert = certificate_from_json(job.field, read_json(cert_file));
    VerifyReport rep =
        verify_certificate(job.op, cert, prefix > 0 ? std::optional<Index>(prefix) : std::nullopt);
    std::cout << (rep.pass ? "PASS" : "FAIL") << ": " << rep.detail << "\n";
    return rep.pass ? kExitOk : kExitVerifyFail;
}

int cmd_demo(const std::string& name) {
    auto run = [&](const FieldSpec& f, const OpPtr& op, const std::string& targets, Index prefix) {
        std::array<QuadraticTarget, 3> t = targets_from_string(f, targets);
        ThreeSumCertificate cert = decompose_three(op, t, prefix);
        std::cout << "route: " << cert.route << "\n";
        for (int i = 0; i < 3; ++i)
            std::cout << "  p" << i + 1 << "(v" << i + 1 << ") = 0 and sum identity verified on prefix "
                      << cert.verified_prefix << "\n";
    };
    FieldSpec q = FieldSpec::rationals(), f2 = FieldSpec::prime(2);
    if (name == "shift-3sz") {
        run(q, make_shift(q), "sq;sq;sq", 256);
        return kExitOk;
    }
    if (name == "downshift-3sz") {
        run(q, make_downshift(q), "sq;sq;sq", 256);
        return kExitOk;
    }
    if (name == "sewing-example") {
        std::map<Index, VectorFin> patch;
        patch.emplace(0, VectorFin(q));
        run(q, make_patch(make_shift(q), std::move(patch)), "sq;sq;sq", 256);
        return kExitOk;
    }
    if (name == "char2-idem") {
        run(f2, make_shift(f2), "idem;idem;idem", 256);
        return kExitOk;
    }
    if (name == "lc3-shift") {
        LC3Result r = lc3(make_shift(q), std::nullopt, 256);
        std::cout << "u = ";
        for (int i = 0; i < 3; ++i) {
            std::cout << r.coefficients[static_cast<std::size_t>(i)].str() << "*q" << i + 1
                      << (i < 2 ? " + " : "\n");
        }
        std::cout << "  q_i^2 = q_i verified on prefix " << r.base.verified_prefix << "\n";
        return kExitOk;
    }
    std::cerr << "unknown demo '" << name
              << "' (available: shift-3sz, downshift-3sz, sewing-example, char2-idem, lc3-shift)\n";
    return kExitInputError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact three-summand quadratic decompositions of column-finite operators"};
    app.require_subcommand(1);

    std::string file, targets, out, cert_file, demo_name;
    Index prefix = 256, q_max = 4;
    std::size_t budget = 4096;
    std::uint64_t seed = 0;

    auto* c_classify = app.add_subcommand("classify", "classify an operator against three targets");
    c_classify->add_option("file", file)->required();
    c_classify->add_option("--targets", targets);

    auto* c_dec = app.add_subcommand("decompose", "decompose into three annihilated summands");
    c_dec->add_option("file", file)->required();
    c_dec->add_option("--targets", targets);
    c_dec->add_option("--prefix", prefix);
    c_dec->add_option("--q-max", q_max);
    c_dec->add_option("--budget", budget);
    c_dec->add_option("--seed", seed);
    c_dec->add_option("--out", out);

    auto* c_ver = app.add_subcommand("verify", "re-verify a certificate");
    c_ver->add_option("operator", file)->required();
    c_ver->add_option("certificate", cert_file)->required();
    Index verify_prefix = 0;
    c_ver->add_option("--prefix", verify_prefix);

    auto* c_demo = app.add_subcommand("demo", "run a named corpus case");
    c_demo->add_option("name", demo_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitInputError;
    }

    try {
        if (c_classify->parsed()) return cmd_classify(file, targets);
        if (c_dec->parsed()) return cmd_decompose(file, targets, prefix, q_max, budget, out);
        if (c_ver->parsed()) return cmd_verify(file, cert_file, verify_prefix);
        if (c_demo->parsed()) return cmd_demo(demo_name);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
