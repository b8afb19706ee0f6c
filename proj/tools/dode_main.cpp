// dode: a symbolic-numeric workbench for second-order delay ODEs.
//
// Subcommands derive stationarity equations from delay Lagrangians, check
// point-symmetry invariance, construct differential first integrals with
// their companion difference relations, verify the underlying operator
// identities, and validate everything numerically with a method-of-steps
// integrator.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dode/noether.hpp"
#include "dode/problem.hpp"
#include "dode/solver.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace dode;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_header(const ProblemFile& pf, std::uint64_t seed) {
    std::printf("dode %s\n", kVersion);
    std::printf("input=%s hash=%016" PRIx64 "\n", pf.source_name.c_str(), pf.content_hash);
    std::printf("seed=%" PRIu64 "\n", seed);
}

std::uint64_t effective_seed(const ProblemFile& pf) {
    if (const char* env = std::getenv("NOETHER_DODE_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
        std::fprintf(stderr, "warning: ignoring malformed NOETHER_DODE_SEED\n");
    }
    return pf.seed;
}

ZeroOptions zero_options(const ProblemFile& pf) {
    ZeroOptions opt;
    opt.seed = effective_seed(pf);
    return opt;
}

const Expr& require_lagrangian(const ProblemFile& pf) {
    if (!pf.lagrangian) throw ValidationError(pf.source_name + ": no lagrangian defined");
    return *pf.lagrangian;
}

int run_parse(const std::string& text, const std::string& constants) {
    ParseOptions opt;
    opt.constants.insert("tau");
    std::istringstream is(constants);
    std::string w;
    while (is >> w) opt.constants.insert(w);
    std::printf("%s\n", to_string(parse(text, opt)).c_str());
    return 0;
}

int run_elsgolts(const std::string& path) {
    ProblemFile pf = load_problem(path);
    print_header(pf, effective_seed(pf));
    std::printf("elsgolts: %s = 0\n",
                to_string(elsgolts_derivative(require_lagrangian(pf))).c_str());
    return 0;
}

int run_extremal(const std::string& path, const std::string& gname) {
    ProblemFile pf = load_problem(path);
    print_header(pf, effective_seed(pf));
    const Generator& g = pf.generator(gname);
    std::printf("generator %s: xi = %s, eta = %s\n", g.name.c_str(), to_string(g.xi).c_str(),
                to_string(g.eta).c_str());
    std::printf("local_extremal: %s = 0\n",
                to_string(local_extremal(require_lagrangian(pf), g)).c_str());
    return 0;
}

int run_invariance(const std::string& path, const std::string& gname, const std::string& target) {
    ProblemFile pf = load_problem(path);
    const std::uint64_t seed = effective_seed(pf);
    print_header(pf, seed);
    const Generator& g = pf.generator(gname);
    std::printf("generator %s: xi = %s, eta = %s\n", g.name.c_str(), to_string(g.xi).c_str(),
                to_string(g.eta).c_str());
    const ZeroOptions opt = zero_options(pf);

    if (target == "lagrangian") {
        InvarianceReport r = lagrangian_invariance(require_lagrangian(pf), g, {}, opt);
        if (!r.regularity.ok)
            std::printf("warning: mesh regularity fails, residual = %s\n",
                        to_string(r.regularity.residual).c_str());
        std::printf("criterion = %s\n", to_string(r.criterion_value).c_str());
        std::printf("verdict: %s\n", verdict_name(r.verdict));
        if (r.divergence_witness) {
            std::printf("witness A = %s\n", to_string(*r.divergence_witness).c_str());
            std::printf("witness certificate: %s\n", r.witness_certificate.describe().c_str());
        }
        std::printf("criterion certificate: %s\n", r.criterion_certificate.describe().c_str());
        return (r.verdict == Verdict::StrictlyInvariant ||
                r.verdict == Verdict::DivergenceInvariant)
                   ? 0
                   : 1;
    }
    if (target == "equation") {
        if (!pf.equation) throw ValidationError(pf.source_name + ": no equation defined");
        EquationInvariance r = dode_invariance(*pf.equation, g, opt);
        if (!r.regularity.ok)
            std::printf("warning: mesh regularity fails, residual = %s\n",
                        to_string(r.regularity.residual).c_str());
        std::printf("solved for %s\n", r.leading.token().c_str());
        std::printf("verdict: %s\n", r.invariant ? "invariant" : "not-invariant");
        std::printf("certificate: %s\n", r.certificate.describe().c_str());
        return r.invariant ? 0 : 1;
    }
    if (target == "elsgolts") {
        RestrictedCheck r = check_elsgolts_invariance_criterion(require_lagrangian(pf), g, opt);
        std::printf("solved for %s\n", r.leading.token().c_str());
        std::printf("verdict: %s\n", r.holds ? "invariant" : "not-invariant");
        std::printf("certificate: %s\n", r.certificate.describe().c_str());
        return r.holds ? 0 : 1;
    }
    throw ValidationError("unknown target '" + target + "'");
}

int run_noether(const std::string& path, const std::string& gname, bool absorb) {
    ProblemFile pf = load_problem(path);
    print_header(pf, effective_seed(pf));
    const Generator& g = pf.generator(gname);
    std::printf("generator %s: xi = %s, eta = %s\n", g.name.c_str(), to_string(g.xi).c_str(),
                to_string(g.eta).c_str());
    NoetherOptions opt;
    opt.absorb_difference = absorb;
    opt.zero = zero_options(pf);
    NoetherPackage p = build_noether_package(require_lagrangian(pf), g, opt);
    std::printf("invariance: %s\n", verdict_name(p.invariance.verdict));
    if (p.divergence_correction_a)
        std::printf("divergence correction A = %s\n",
                    to_string(*p.divergence_correction_a).c_str());
    std::printf("integral I = %s\n", to_string(p.integral).c_str());
    if (p.relation_trivial)
        std::printf("difference relation: 0 = 0 (trivial)\n");
    else
        std::printf("difference relation: %s = %s%s\n", to_string(p.relation_lhs).c_str(),
                    to_string(p.relation_rhs).c_str(),
                    p.difference_correction_c ? " (absorbed)" : "");
    if (p.difference_correction_c)
        std::printf("difference correction C = %s\n",
                    to_string(*p.difference_correction_c).c_str());
    std::printf("restriction_free: %s\n", p.restriction_free ? "yes" : "no");
    std::printf("local extremal equation: %s = 0\n", to_string(p.local_extremal_eq).c_str());
    std::printf("reduction certificate: %s\n", p.reduction_certificate.describe().c_str());
    return p.reduction_certificate.zero ? 0 : 1;
}

int run_identity(const std::string& path, const std::string& gname, const std::string& which) {
    ProblemFile pf = load_problem(path);
    print_header(pf, effective_seed(pf));
    const Generator& g = pf.generator(gname);
    const ZeroOptions opt = zero_options(pf);
    const Expr& L = require_lagrangian(pf);
    IdentityCheck c;
    if (which == "master") c = verify_master_identity(L, g, opt);
    else if (which == "lemma2") c = verify_lemma2(L, g, opt);
    else throw ValidationError("unknown identity '" + which + "'");
    std::printf("residual = %s\n", to_string(c.residual).c_str());
    std::printf("certificate: %s\n", c.certificate.describe().c_str());
    return c.certificate.zero ? 0 : 1;
}

int run_simulate(const std::string& path, const std::string& output) {
    ProblemFile pf = load_problem(path);
    print_header(pf, effective_seed(pf));
    if (!pf.has_simulate) throw ValidationError(pf.source_name + ": no [simulate] section");
    if (!pf.history_phi) throw ValidationError(pf.source_name + ": no [history] section");

    Expr equation = pf.equation ? *pf.equation : elsgolts_derivative(require_lagrangian(pf));
    ExplicitDODE dode = normalize(equation, pf.tau);
    if (!dode.two_delays)
        std::printf("warning: right-hand side has no dependence at level -2 "
                    "(single-delay equation)\n");
    std::printf("equation: ddu = %s\n", to_string(dode.rhs).c_str());

    History history = make_history(*pf.history_phi, pf.history_t0);
    Trajectory traj = integrate(dode, history, pf.t_end, pf.steps_per_delay);
    std::printf("grid: t0=%s tau=%s m=%d steps=%d\n", fmt(traj.t0).c_str(),
                fmt(traj.tau).c_str(), traj.m, traj.steps);

    if (!output.empty()) {
        std::ofstream os(output, std::ios::binary);
        if (!os) throw Error("cannot open output file: " + output);
        write_trajectory(traj, os);
        std::printf("trajectory written to %s (%d nodes)\n", output.c_str(),
                    traj.last_node() - traj.first_node() + 1);
    }

    bool all_pass = true;
    for (const ProblemMonitor& mon : pf.monitors) {
        double measure = 0.0;
        MonitorWindow w;
        switch (mon.kind) {
            case ProblemMonitor::Kind::Integral: {
                DriftReport r = monitor_differential(traj, mon.expr, mon.constants);
                std::printf("[monitor integral %s]\n", mon.name.c_str());
                std::printf("reference=%s\n", fmt(r.reference).c_str());
                measure = r.max_drift;
                w = r.window;
                break;
            }
            case ProblemMonitor::Kind::Difference: {
                if (mon.from_pair) {
                    ResidualReport r = verify_closed_relation(traj, mon.expr, mon.constants);
                    measure = r.max_residual;
                    w = r.window;
                } else {
                    PeriodicityReport r = monitor_difference(traj, mon.expr, mon.constants);
                    measure = r.max_deviation;
                    w = r.window;
                }
                std::printf("[monitor difference %s]\n", mon.name.c_str());
                break;
            }
            case ProblemMonitor::Kind::Relation: {
                ResidualReport r = verify_closed_relation(traj, mon.expr, mon.constants);
                std::printf("[monitor relation %s]\n", mon.name.c_str());
                measure = r.max_residual;
                w = r.window;
                break;
            }
        }
        std::printf("max_drift=%s\n", fmt(measure).c_str());
        std::printf("window=[%s,%s]\n", fmt(w.t_lo).c_str(), fmt(w.t_hi).c_str());
        std::printf("nodes=%d\n", w.nodes);
        std::printf("tolerance=%s\n", fmt(mon.tolerance).c_str());
        const bool pass = measure < mon.tolerance;
        std::printf("status=%s\n", pass ? "pass" : "fail");
        all_pass = all_pass && pass;
    }
    std::printf("monitors: %s\n", all_pass ? "all passed" : "FAILURES");
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic-numeric workbench for second-order delay ODEs"};
    app.set_version_flag("--version", std::string("dode ") + kVersion);
    app.require_subcommand(1);

    std::string expr_text, constants, file, gname, target = "lagrangian", which = "master";
    std::string output;
    bool absorb = false;

    auto* cparse = app.add_subcommand("parse", "parse an expression and print its canonical form");
    cparse->add_option("expr", expr_text, "expression text")->required();
    cparse->add_option("--constants", constants, "extra constant names (space separated)");

    auto* celsg = app.add_subcommand("elsgolts", "derive the Elsgolts equation of the Lagrangian");
    celsg->add_option("file", file, "problem file")->required();

    auto* cext = app.add_subcommand("extremal", "derive the local extremal equation for a generator");
    cext->add_option("file", file, "problem file")->required();
    cext->add_option("--generator", gname, "generator name")->required();

    auto* cinv = app.add_subcommand("invariance", "check invariance under a generator");
    cinv->add_option("file", file, "problem file")->required();
    cinv->add_option("--generator", gname, "generator name")->required();
    cinv->add_option("--target", target, "lagrangian | equation | elsgolts");

    auto* cnoe = app.add_subcommand("noether", "construct the first integral and difference relation");
    cnoe->add_option("file", file, "problem file")->required();
    cnoe->add_option("--generator", gname, "generator name")->required();
    cnoe->add_flag("--absorb", absorb, "absorb the difference relation into the integral");

    auto* cid = app.add_subcommand("identity", "verify an operator identity instance");
    cid->add_option("file", file, "problem file")->required();
    cid->add_option("--generator", gname, "generator name")->required();
    cid->add_option("--which", which, "master | lemma2");

    auto* csim = app.add_subcommand("simulate", "integrate and run the monitors");
    csim->add_option("file", file, "problem file")->required();
    csim->add_option("--output", output, "trajectory output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cparse->parsed()) return run_parse(expr_text, constants);
        if (celsg->parsed()) return run_elsgolts(file);
        if (cext->parsed()) return run_extremal(file, gname);
        if (cinv->parsed()) return run_invariance(file, gname, target);
        if (cnoe->parsed()) return run_noether(file, gname, absorb);
        if (cid->parsed()) return run_identity(file, gname, which);
        if (csim->parsed()) return run_simulate(file, output);
    } catch (const dode::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
