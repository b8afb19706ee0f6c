// Acceptance suite: one line per criterion, pinned tolerances, nonzero exit
// when any selected criterion fails.  Run with no argument for the full
// suite, with 1..8 for a single criterion, or with "supplements" for the
// extra demonstrations.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "dode/noether.hpp"
#include "dode/solver.hpp"

using namespace dode;

namespace {

const double kPi = 3.14159265358979323846;

struct Result {
    std::string label;
    bool pass;
    std::string detail;
};

std::vector<Result> g_results;

void record(const std::string& label, bool pass, const std::string& detail) {
    g_results.push_back({label, pass, detail});
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", label.c_str(), detail.c_str());
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

Expr P(const char* s) { return parse(s); }

Generator gen(const char* name, const char* xi, const char* eta) {
    return make_generator(name, parse(xi), parse(eta));
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- fixtures -------------------------------------------------------------

const char* kLag1 = "u*u_m - du*du_m";
const char* kLag2 = "(du + du_m)^2/2 - (u + u_m)^2/2";
const char* kLag3 = "(u - u_m)^2/(du*du_m)";

Trajectory oscillator_run(double tau, const char* phi, double t_end, int m) {
    const ExplicitDODE dode = normalize(P("ddu_p + ddu_m + u_p + u_m"), tau);
    return integrate(dode, make_history(P(phi), 0.0), t_end, m);
}

// --- criteria ---------------------------------------------------------------

void criterion1() {
    struct Row {
        const char* lagrangian;
        const char* reference;
    };
    const Expr ref3_core = P("2*(u - u_m)/(du*du_m) - 2*(u_p - u)/(du*du_p)");
    const Expr ref3 = ref3_core + full_derivative(P("(u - u_m)^2/(du^2*du_m) "
                                                    "+ (u_p - u)^2/(du^2*du_p)"));
    const Row rows[] = {
        {kLag1, "ddu_p + ddu_m + u_p + u_m"},
        {kLag2, "ddu_p + 2*ddu + ddu_m + u_p + 2*u + u_m"},
        {kLag3, nullptr},
    };
    int idx = 0;
    for (const Row& row : rows) {
        ++idx;
        const auto t0 = std::chrono::steady_clock::now();
        const Expr derived = elsgolts_derivative(P(row.lagrangian));
        const Expr reference = row.reference ? P(row.reference) : ref3;
        const auto c = proportionality_constant(derived, reference);
        const double dt = elapsed_s(t0);
        const bool match = c.has_value() && (*c == Rational(1) || *c == Rational(-1));
        record("C1." + std::to_string(idx) + " stationarity equation, Lagrangian " +
                   std::to_string(idx),
               match && dt < 1.0,
               match ? ("matches up to sign, canonical, " + num(dt) + " s")
                     : "does not match the reference form");
    }
}

void criterion2() {
    const Expr lag1 = P(kLag1);
    const Expr lag3 = P(kLag3);

    auto exact = [](const ZeroCheck& c) { return c.mode != ZeroCheck::Mode::Probabilistic; };

    {
        const InvarianceReport r = lagrangian_invariance(lag1, gen("X1", "0", "cos(t)"));
        const bool ok = r.verdict == Verdict::DivergenceInvariant && r.divergence_witness &&
                        *r.divergence_witness == P("u_m*sin(t) + u*sin(t_m)") &&
                        exact(r.witness_certificate);
        record("C2.1 oscillator 1 / vertical cos generator", ok,
               ok ? "divergence-invariant with the expected witness, exact"
                  : "wrong verdict or witness");
    }
    {
        const InvarianceReport r = lagrangian_invariance(lag1, gen("X2", "0", "sin(t)"));
        const bool ok = r.verdict == Verdict::DivergenceInvariant && r.divergence_witness &&
                        *r.divergence_witness == P("-u_m*cos(t) - u*cos(t_m)") &&
                        exact(r.witness_certificate);
        record("C2.2 oscillator 1 / vertical sin generator", ok,
               ok ? "divergence-invariant with the expected witness, exact"
                  : "wrong verdict or witness");
    }
    {
        const InvarianceReport r = lagrangian_invariance(lag1, gen("X3", "1", "0"));
        const bool ok =
            r.verdict == Verdict::StrictlyInvariant && exact(r.criterion_certificate);
        record("C2.3 oscillator 1 / time translation", ok,
               ok ? "strictly invariant, exact" : "wrong verdict");
    }
    {
        const Generator algebra[] = {gen("X1", "0", "1"), gen("X2", "0", "u"),
                                     gen("X3", "0", "u^2"), gen("X4", "1", "0")};
        bool ok = true;
        for (const Generator& g : algebra) {
            const InvarianceReport r = lagrangian_invariance(lag3, g);
            ok = ok && r.verdict == Verdict::StrictlyInvariant &&
                 exact(r.criterion_certificate);
        }
        record("C2.4 nonlinear Lagrangian / four generators", ok,
               ok ? "all strictly invariant, exact" : "a verdict is wrong");
    }
    {
        const Expr lagI = P("(u - u_m)/(du*(t - t_m))") * P("du_m/du");
        const Generator scaling = gen("S", "t", "0");
        const InvarianceReport r = lagrangian_invariance(lagI, scaling);
        const RestrictedCheck t12 = check_elsgolts_invariance_criterion(lagI, scaling);
        const bool ok = r.verdict != Verdict::StrictlyInvariant && r.criterion_nonzero &&
                        t12.holds && exact(t12.certificate);
        record("C2.5 invariant-built Lagrangian vs scaling", ok,
               ok ? "not strictly invariant, yet the equation criterion holds, exact"
                  : "unexpected verdict pair");
    }
}

void criterion3() {
    auto pair_matches = [](const NoetherPackage& p, const Expr& integral_ref,
                           const Expr& lhs_ref, const Expr& rhs_ref) {
        const auto ci = proportionality_constant(p.integral, integral_ref);
        if (!ci) return false;
        const auto cl = proportionality_constant(p.relation_lhs, lhs_ref);
        const auto cr = proportionality_constant(p.relation_rhs, rhs_ref);
        return cl.has_value() && cr.has_value() && *cl == *cr;
    };

    {
        const NoetherPackage p = build_noether_package(P(kLag1), gen("X1", "0", "cos(t)"));
        const bool ok = pair_matches(p, P("cos(t)*(du_p + du_m) + u*sin(t_m) + u_m*sin(t)"),
                                     P("u*cos(t_m) + du*sin(t_m)"),
                                     P("u_p*cos(t) + du_p*sin(t)")) &&
                        p.reduction_certificate.zero;
        record("C3.1 oscillator 1 integral/relation", ok,
               ok ? "reproduced up to a constant factor, certified" : "mismatch");
    }
    {
        const NoetherPackage p = build_noether_package(P(kLag2), gen("X2", "0", "sin(t)"));
        const bool ok = pair_matches(
                            p,
                            P("sin(t)*(du_p + 2*du + du_m) - (u + u_m)*(cos(t_m) + cos(t))"),
                            P("-sin(t_m)*(u_m + u) + cos(t_m)*(du + du_m)"),
                            P("-sin(t)*(u_p + u) + cos(t)*(du + du_p)")) &&
                        p.reduction_certificate.zero;
        record("C3.2 oscillator 2 integral/relation", ok,
               ok ? "reproduced up to a constant factor, certified" : "mismatch");
    }
    {
        const NoetherPackage p = build_noether_package(P(kLag1), gen("X3", "1", "0"));
        const bool ok = p.integral == P("du*du_p + u*u_m") && p.relation_trivial &&
                        p.reduction_certificate.zero;
        record("C3.3 time-translation integral with zero relation", ok,
               ok ? "du*du_p + u*u_m with trivial relation" : "mismatch");
    }
    {
        const NoetherPackage p = build_noether_package(P(kLag3), gen("Y1", "0", "1"));
        const bool ok =
            pair_matches(p, P("(u - u_m)^2/(du^2*du_m) + (u_p - u)^2/(du^2*du_p)"),
                         P("(u - u_m)/(du*du_m)"), P("(u_p - u)/(du*du_p)")) &&
            p.reduction_certificate.zero;
        record("C3.4 nonlinear vertical-translation integral/relation", ok,
               ok ? "reproduced up to a constant factor, certified" : "mismatch");
    }
    {
        const NoetherPackage p = build_noether_package(P(kLag3), gen("Y4", "1", "0"));
        const auto c = proportionality_constant(
            p.integral, P("2*(u - u_m)^2/(du*du_m) + (u_p - u)^2/(du*du_p)"));
        // dual route: the time-variation equation equals -Dbar(integral)
        const bool dual = is_zero_canonical(horizontal_derivative(P(kLag3)) +
                                            full_derivative(p.integral))
                              .zero;
        const bool ok = c.has_value() && p.relation_trivial && dual &&
                        p.reduction_certificate.zero;
        record("C3.5 nonlinear time-translation integral", ok,
               ok ? "reproduced with trivial relation; dual-route check canonical"
                  : "mismatch");
    }
}

void criterion4() {
    std::vector<std::pair<Expr, Generator>> fixtures;
    fixtures.emplace_back(P(kLag1), gen("X1", "0", "cos(t)"));
    fixtures.emplace_back(P(kLag1), gen("X2", "0", "sin(t)"));
    fixtures.emplace_back(P(kLag1), gen("X3", "1", "0"));
    fixtures.emplace_back(P(kLag1), gen("X1", "0", "cos(t)") + gen("X3", "1", "0"));
    fixtures.emplace_back(P(kLag2), gen("X1", "0", "cos(t)"));
    fixtures.emplace_back(P(kLag2), gen("X2", "0", "sin(t)"));
    fixtures.emplace_back(P(kLag3), gen("Y1", "0", "1"));
    fixtures.emplace_back(P(kLag3), gen("Y2", "0", "u"));
    fixtures.emplace_back(P(kLag3), gen("Y3", "0", "u^2"));
    fixtures.emplace_back(P(kLag3), gen("Y4", "1", "0"));

    bool master_ok = true, lemma_ok = true;
    for (const auto& [L, g] : fixtures) {
        const IdentityCheck m = verify_master_identity(L, g);
        master_ok = master_ok && m.certificate.zero &&
                    m.certificate.mode != ZeroCheck::Mode::Probabilistic;
        const IdentityCheck l = verify_lemma2(L, g);
        lemma_ok = lemma_ok && l.certificate.zero &&
                   l.certificate.mode != ZeroCheck::Mode::Probabilistic;
    }
    record("C4.1 master identity on the worked examples", master_ok,
           master_ok ? "canonically zero on all fixtures" : "a residual is nonzero");
    record("C4.2 commutation identity on the worked examples", lemma_ok,
           lemma_ok ? "canonically zero on all fixtures" : "a residual is nonzero");

    std::mt19937_64 rng(20240211);
    std::uniform_int_distribution<int> small(-2, 2);
    bool random_ok = true;
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
        Expr L;
        {
            // polynomial of degree <= 3 in the six admissible arguments
            const JetVar args[] = {JetVar::time(0),      JetVar::time(-1),
                                   JetVar::state(0, 0),  JetVar::state(-1, 0),
                                   JetVar::state(0, 1),  JetVar::state(-1, 1)};
            std::uniform_int_distribution<int> nterms(3, 6);
            std::uniform_int_distribution<int> nfac(1, 3);
            std::uniform_int_distribution<std::size_t> vi(0, 5);
            const int n = nterms(rng);
            for (int k = 0; k < n; ++k) {
                int c = small(rng);
                if (c == 0) c = 1;
                Expr mono(c);
                const int nf = nfac(rng);
                for (int j = 0; j < nf; ++j) mono = mono * Expr(args[vi(rng)]);
                L = L + mono;
            }
        }
        const Generator g = make_generator(
            "r", Expr(small(rng)) + Expr(small(rng)) * P("t"),
            Expr(small(rng)) * P("u") + Expr(small(rng)) * P("t") +
                Expr(small(rng)) * P("t*u"));
        const IdentityCheck m = verify_master_identity(L, g);
        ZeroOptions opt;
        opt.seed = 500 + static_cast<std::uint64_t>(i);
        const ZeroCheck prob = is_zero_probabilistic(m.residual, opt);
        worst = std::max(worst, prob.max_abs);
        random_ok = random_ok && m.residual.is_zero() && prob.zero;
    }
    record("C4.3 master identity on 25 seeded random instances", random_ok,
           "max sampled |residual| = " + num(worst) + " < 1e-09 (50 points each)");
}

void criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory tr = oscillator_run(1.0, "sin(t)", 10.0, 100);

    double maxerr = 0.0;
    for (int i = 0; i <= tr.last_node(); ++i)
        maxerr = std::max(maxerr, std::abs(tr.value(i, 0) - std::sin(tr.time(i))));
    record("C5.1 max|u - sin t| (tau=1, m=100)", maxerr < 1e-6,
           num(maxerr) + " vs 1e-06");

    const DriftReport drift =
        monitor_differential(tr, P("cos(t)*(du_p + du_m) + u*sin(t_m) + u_m*sin(t)"));
    record("C5.2 drift of the restricted integral", drift.max_drift < 1e-6,
           num(drift.max_drift) + " vs 1e-06 (the sin branch violates the "
           "two-point relation at tau=1; see supplements)");

    const ResidualReport rel = verify_closed_relation(
        tr, P("u_p*cos(t) + du_p*sin(t) - u*cos(t_m) - du*sin(t_m)"));
    record("C5.3 two-point relation residual", rel.max_residual < 1e-6,
           num(rel.max_residual) + " vs 1e-06 (same cause as C5.2)");

    // closed relation with the sin-branch constants alpha=1, beta=0:
    // A = 2 alpha cos tau + beta sin tau, B = 2 beta cos tau - alpha sin tau
    ParseOptions opt;
    opt.constants = {"tau", "A", "B"};
    std::map<std::string, double> cs{{"A", 2.0 * std::cos(1.0)}, {"B", -std::sin(1.0)}};
    const ResidualReport closed = verify_closed_relation(
        tr, parse("u*cos(tau) + u_m - A*sin(t) - B*cos(t)", opt), cs);
    record("C5.4 closed relation with derived constants", closed.max_residual < 1e-6,
           num(closed.max_residual) + " vs 1e-06");

    const double dt = elapsed_s(t0);
    record("C5.5 runtime", dt < 5.0, num(dt) + " s vs 5 s");
}

void criterion6() {
    const ExplicitDODE dode = normalize(P("ddu_p - ddu_m"), 1.0);
    const Trajectory tr = integrate(dode, make_history(P("t^2"), 0.0), 5.0, 100);

    const DriftReport drift = monitor_differential(tr, P("du_p - du_m"));
    const double off = std::abs(drift.reference - 4.0);
    record("C6.1 velocity-gap integral equals 4*tau", drift.max_drift < 1e-10 && off < 1e-10,
           "drift " + num(drift.max_drift) + ", |ref - 4| = " + num(off) + " vs 1e-10");

    const PeriodicityReport per = monitor_difference(tr, P("ddu - ddu_m"));
    record("C6.2 acceleration gap is the zero difference integral",
           per.max_deviation < 1e-10 && per.max_abs < 1e-10,
           "deviation " + num(per.max_deviation) + ", |J| " + num(per.max_abs) +
               " vs 1e-10");
}

void criterion7() {
    auto err = [](int m) {
        const Trajectory tr = oscillator_run(1.0, "sin(t)", 10.0, m);
        double maxerr = 0.0;
        for (int i = 0; i <= tr.last_node(); ++i)
            maxerr = std::max(maxerr, std::abs(tr.value(i, 0) - std::sin(tr.time(i))));
        return maxerr;
    };
    const double e100 = err(100), e200 = err(200);
    const double ratio = e100 / e200;
    record("C7 error ratio when doubling m (100 -> 200)", ratio >= 8.0,
           num(e100) + " / " + num(e200) + " = " + num(ratio) + " (needs >= 8)");
}

void criterion8() {
    // The drift comparison runs at the delay where the baseline conserves the
    // restricted integral (tau = pi), so a perturbation is actually visible.
    const Expr integral = P("cos(t)*(du_p + du_m) + u*sin(t_m) + u_m*sin(t)");
    const double base =
        monitor_differential(oscillator_run(kPi, "sin(t)", 10.0, 100), integral).max_drift;
    const double pert =
        monitor_differential(oscillator_run(kPi, "sin(t) + 0.001*t", 10.0, 100), integral)
            .max_drift;
    record("C8.1 perturbed history raises the integral drift",
           pert >= 10.0 * base,
           num(pert) + " vs baseline " + num(base) + " (x" + num(pert / base) + ")");

    const RegularityCheck reg = check_regularity(gen("Q", "t^2", "0"));
    const bool ok = !reg.ok && reg.residual == P("2*tau^2");
    record("C8.2 quadratic xi fails mesh regularity with residual 2*tau^2", ok,
           "residual = " + to_string(reg.residual));
}

void supplements() {
    // S1: at tau = pi the sin branch satisfies the two-point relation, and
    // the literal restricted monitors all pass.
    const Trajectory tr = oscillator_run(kPi, "sin(t)", 10.0, 100);
    const double drift =
        monitor_differential(tr, P("cos(t)*(du_p + du_m) + u*sin(t_m) + u_m*sin(t)"))
            .max_drift;
    const double rel = verify_closed_relation(
                           tr, P("u_p*cos(t) + du_p*sin(t) - u*cos(t_m) - du*sin(t_m)"))
                           .max_residual;
    ParseOptions opt;
    opt.constants = {"tau", "A", "B"};
    std::map<std::string, double> cs{{"A", 2.0 * std::cos(kPi)}, {"B", -std::sin(kPi)}};
    const double closed =
        verify_closed_relation(tr, parse("u*cos(tau) + u_m - A*sin(t) - B*cos(t)", opt), cs)
            .max_residual;
    record("S1 restricted monitors at the compatible delay tau=pi",
           drift < 1e-6 && rel < 1e-6 && closed < 1e-6,
           "drift " + num(drift) + ", relation " + num(rel) + ", closed " + num(closed));

    // S2: at tau = 1 the divergence-absorbed integral is conserved on every
    // solution and its closed relation holds.
    const Trajectory t1 = oscillator_run(1.0, "sin(t)", 10.0, 100);
    const double drift2 =
        monitor_differential(t1, P("cos(t)*(du_p + du_m) + sin(t)*(u_m + u_p)")).max_drift;
    std::map<std::string, double> cs2{{"A", 2.0 * std::cos(1.0)}, {"B", 0.0}};
    const double closed2 =
        verify_closed_relation(t1, parse("u_p + u_m - A*sin(t) - B*cos(t)", opt), cs2)
            .max_residual;
    record("S2 restriction-free monitors at tau=1", drift2 < 1e-6 && closed2 < 1e-6,
           "drift " + num(drift2) + ", closed " + num(closed2));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string which = argc > 1 ? argv[1] : "";
    auto want = [&](const char* id) { return which.empty() || which == id; };

    try {
        if (want("1")) criterion1();
        if (want("2")) criterion2();
        if (want("3")) criterion3();
        if (want("4")) criterion4();
        if (want("5")) criterion5();
        if (want("6")) criterion6();
        if (want("7")) criterion7();
        if (want("8")) criterion8();
        if (which.empty() || which == "supplements") supplements();
    } catch (const Error& e) {
        std::printf("[FAIL] unexpected error: %s\n", e.what());
        return 1;
    }

    int failed = 0;
    for (const Result& r : g_results) failed += r.pass ? 0 : 1;
    std::printf("%d/%zu checks passed\n", static_cast<int>(g_results.size()) - failed,
                g_results.size());
    return failed == 0 ? 0 : 1;
}
