#include <random>

#include "doctest.h"
#include "dode/noether.hpp"
#include "test_util.hpp"

using namespace dode;
using testutil::canon_zero;
using testutil::P;

namespace {

Generator gen(const char* name, const char* xi, const char* eta) {
    return make_generator(name, P(xi), P(eta));
}

const Expr kLag1 = P("u*u_m - du*du_m");
const Expr kLag2 = P("(du + du_m)^2/2 - (u + u_m)^2/2");
const Expr kLag3 = P("(u - u_m)^2/(du*du_m)");

std::vector<std::pair<Expr, Generator>> fixture_pairs() {
    std::vector<std::pair<Expr, Generator>> out;
    out.emplace_back(kLag1, gen("X1", "0", "cos(t)"));
    out.emplace_back(kLag1, gen("X2", "0", "sin(t)"));
    out.emplace_back(kLag1, gen("X3", "1", "0"));
    out.emplace_back(kLag1, gen("X1", "0", "cos(t)") + gen("X3", "1", "0"));
    out.emplace_back(kLag2, gen("X1", "0", "cos(t)"));
    out.emplace_back(kLag2, gen("X2", "0", "sin(t)"));
    out.emplace_back(kLag3, gen("Y1", "0", "1"));
    out.emplace_back(kLag3, gen("Y2", "0", "u"));
    out.emplace_back(kLag3, gen("Y3", "0", "u^2"));
    out.emplace_back(kLag3, gen("Y4", "1", "0"));
    return out;
}

}  // namespace

TEST_CASE("master identity closes canonically on the worked examples") {
    for (const auto& [L, g] : fixture_pairs()) {
        CAPTURE(to_string(L));
        CAPTURE(g.name);
        const IdentityCheck c = verify_master_identity(L, g);
        CHECK(c.certificate.zero);
        CHECK(c.certificate.mode != ZeroCheck::Mode::Probabilistic);
    }
}

TEST_CASE("master identity on random data") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> small(-2, 2);
    for (int i = 0; i < 25; ++i) {
        const Expr L = testutil::random_lagrangian(rng);
        const Generator g = make_generator(
            "r", Expr(small(rng)) + Expr(small(rng)) * P("t"),
            Expr(small(rng)) * P("u") + Expr(small(rng)) * P("t") + Expr(small(rng)) * P("t*u"));
        const IdentityCheck c = verify_master_identity(L, g);
        CHECK(c.residual.is_zero());  // polynomial data closes exactly

        ZeroOptions opt;
        opt.seed = 1000 + i;
        CHECK(is_zero_probabilistic(c.residual, opt).zero);
    }
}

TEST_CASE("variational commutation identity") {
    for (const auto& [L, g] : fixture_pairs()) {
        CAPTURE(to_string(L));
        CAPTURE(g.name);
        const IdentityCheck c = verify_lemma2(L, g);
        CHECK(c.certificate.zero);
        CHECK(c.certificate.mode != ZeroCheck::Mode::Probabilistic);
    }

    std::mt19937_64 rng(71);
    std::uniform_int_distribution<int> small(-2, 2);
    for (int i = 0; i < 10; ++i) {
        const Expr L = testutil::random_lagrangian(rng);
        const Generator g = make_generator("r", Expr(small(rng)) + Expr(small(rng)) * P("t"),
                                           Expr(small(rng)) * P("u*t") + Expr(small(rng)));
        CHECK(verify_lemma2(L, g).residual.is_zero());
    }
}

TEST_CASE("commutation identity hypotheses are enforced") {
    try {
        verify_lemma2(kLag1, gen("bad", "t^2", "0"));
        FAIL("expected a hypothesis error");
    } catch (const HypothesisError& e) {
        // the error names the offending mesh residual
        CHECK(std::string(e.what()).find("2*tau^2") != std::string::npos);
    }
    CHECK_THROWS_AS(verify_lemma2(kLag1, gen("bad", "u", "0")), HypothesisError);
}

TEST_CASE("Elsgolts invariance criterion on the solution manifold") {
    CHECK(check_elsgolts_invariance_criterion(kLag1, gen("X1", "0", "cos(t)")).holds);
    CHECK(check_elsgolts_invariance_criterion(P("du^2/2"), gen("time", "1", "0")).holds);

    // the equation admits the scaling even though the Lagrangian does not
    const Expr lagI = P("(u - u_m)/(du*(t - t_m))") * P("du_m/du");
    const Generator scaling = gen("X3", "t", "0");
    const InvarianceReport lag = lagrangian_invariance(lagI, scaling);
    CHECK(lag.verdict != Verdict::StrictlyInvariant);
    const RestrictedCheck eq = check_elsgolts_invariance_criterion(lagI, scaling);
    CHECK(eq.holds);
    CHECK(eq.certificate.mode != ZeroCheck::Mode::Probabilistic);
}

TEST_CASE("first integral package for the linear oscillator") {
    const NoetherPackage p = build_noether_package(kLag1, gen("X1", "0", "cos(t)"));

    // integral matches the classical expression up to a constant factor
    const auto c = proportionality_constant(
        p.integral, P("cos(t)*(du_p + du_m) + u*sin(t_m) + u_m*sin(t)"));
    REQUIRE(c.has_value());
    CHECK(*c == Rational(-1));

    // difference relation matches with the same orientation on both sides
    const auto cl = proportionality_constant(p.relation_lhs, P("u*cos(t_m) + du*sin(t_m)"));
    const auto cr = proportionality_constant(p.relation_rhs, P("u_p*cos(t) + du_p*sin(t)"));
    REQUIRE(cl.has_value());
    REQUIRE(cr.has_value());
    CHECK(*cl == *cr);
    CHECK_FALSE(p.relation_trivial);
    CHECK_FALSE(p.restriction_free);
    CHECK(p.reduction_certificate.zero);
    CHECK(canon_zero(p.relation_rhs - shift(p.relation_lhs, 1)));
}

TEST_CASE("difference absorption turns the integral restriction free") {
    NoetherOptions opt;
    opt.absorb_difference = true;
    const NoetherPackage p = build_noether_package(kLag1, gen("X1", "0", "cos(t)"), opt);
    REQUIRE(p.difference_correction_c.has_value());
    CHECK(p.restriction_free);
    const auto c = proportionality_constant(
        p.integral, P("cos(t)*(du_p + du_m) + sin(t)*(u_m + u_p)"));
    REQUIRE(c.has_value());
    CHECK(*c == Rational(-1));
    CHECK(p.reduction_certificate.zero);

    // the absorbed derivative is a multiple of the stationarity equation
    const Expr dI = full_derivative(p.integral);
    CHECK(canon_zero(dI + P("cos(t)") * elsgolts_derivative(kLag1)));
}

TEST_CASE("time translation yields the nonlinear integral with a trivial relation") {
    const NoetherPackage p = build_noether_package(kLag1, gen("X3", "1", "0"));
    CHECK(p.integral == P("du*du_p + u*u_m"));
    CHECK(p.relation_trivial);
    CHECK(p.restriction_free);
    CHECK(p.reduction_certificate.zero);
    CHECK_FALSE(p.divergence_correction_a.has_value());
}

TEST_CASE("second oscillator package") {
    const NoetherPackage p = build_noether_package(kLag2, gen("X2", "0", "sin(t)"));
    CHECK(p.integral ==
          P("sin(t)*(du_p + 2*du + du_m) - (u + u_m)*(cos(t_m) + cos(t))"));
    const auto cl = proportionality_constant(
        p.relation_lhs, P("-sin(t_m)*(u_m + u) + cos(t_m)*(du + du_m)"));
    const auto cr = proportionality_constant(
        p.relation_rhs, P("-sin(t)*(u_p + u) + cos(t)*(du + du_p)"));
    REQUIRE(cl.has_value());
    REQUIRE(cr.has_value());
    CHECK(*cl == *cr);
    CHECK(*cl == Rational(1));
    CHECK(p.reduction_certificate.zero);
}

TEST_CASE("nonlinear Lagrangian packages") {
    SUBCASE("vertical translation") {
        const NoetherPackage p = build_noether_package(kLag3, gen("Y1", "0", "1"));
        const auto c = proportionality_constant(
            p.integral, P("(u - u_m)^2/(du^2*du_m) + (u_p - u)^2/(du^2*du_p)"));
        REQUIRE(c.has_value());
        CHECK(*c == Rational(-1));

        const auto cl =
            proportionality_constant(p.relation_lhs, P("(u - u_m)/(du*du_m)"));
        const auto cr =
            proportionality_constant(p.relation_rhs, P("(u_p - u)/(du*du_p)"));
        REQUIRE(cl.has_value());
        REQUIRE(cr.has_value());
        CHECK(*cl == *cr);
        CHECK(p.reduction_certificate.zero);
    }
    SUBCASE("time translation has a trivial relation and the doubled integral") {
        const NoetherPackage p = build_noether_package(kLag3, gen("Y4", "1", "0"));
        CHECK(p.relation_trivial);
        const auto c = proportionality_constant(
            p.integral, P("2*(u - u_m)^2/(du*du_m) + (u_p - u)^2/(du*du_p)"));
        REQUIRE(c.has_value());
        CHECK(*c == Rational(1));
        // dual route: the time-variation equation is exactly -Dbar(integral)
        CHECK(canon_zero(horizontal_derivative(kLag3) + full_derivative(p.integral)));
        CHECK(p.reduction_certificate.zero);
    }
}

TEST_CASE("package construction needs an invariant Lagrangian") {
    CHECK_THROWS_AS(build_noether_package(kLag1, gen("bad", "0", "u^2")), Error);
}

TEST_CASE("combined generator of the two oscillator symmetries") {
    const Generator combined = gen("X1", "0", "cos(t)") + gen("X3", "1", "0");
    const NoetherPackage p = build_noether_package(kLag1, combined);
    CHECK(p.invariance.verdict == Verdict::DivergenceInvariant);
    // linearity: the current of the sum is the sum of the currents
    const Expr expected = P("du_p*du + u*u_m") -
                          P("cos(t)*(du_p + du_m) + u*sin(t_m) + u_m*sin(t)");
    CHECK(canon_zero(p.integral - expected));
    // the relation coincides with the vertical generator's one
    CHECK(canon_zero(p.relation_lhs - P("u*cos(t_m) + du*sin(t_m)")));
    CHECK(p.reduction_certificate.zero);

    // master identity instance ties all package parts together
    const Expr crit = prolong(combined, kLag1) + kLag1 * total_derivative_at(combined.xi, 0);
    const Expr residual = crit - local_extremal(kLag1, combined) -
                          full_derivative(noether_current(kLag1, combined)) -
                          (p.relation_lhs - p.relation_rhs);
    CHECK(canon_zero(residual));
}

TEST_CASE("reduction modulo relations") {
    SUBCASE("the oscillator integral derivative reduces to zero") {
        const Expr integral = P("cos(t)*(du_p + du_m) + u*sin(t_m) + u_m*sin(t)");
        const Expr elsg1 = P("ddu_p + ddu_m + u_p + u_m");
        const Expr relation = P("u_p*cos(t) + du_p*sin(t) - u*cos(t_m) - du*sin(t_m)");
        const Expr reduced = reduce_modulo(
            full_derivative(integral),
            {{elsg1, JetVar::state(1, 2)}, {relation, JetVar::state(1, 0)}});
        CHECK(reduced.is_zero());
    }
    SUBCASE("expressions free of the solved variables are untouched") {
        const Expr e = P("u*u_m");
        CHECK(reduce_modulo(e, {{P("ddu_p + u"), JetVar::state(1, 2)}}) == e);
    }
    SUBCASE("non-affine relations are rejected") {
        CHECK_THROWS_AS(
            reduce_modulo(P("ddu_p"), {{P("ddu_p^2 - u"), JetVar::state(1, 2)}}),
            NonAffineError);
    }
}

TEST_CASE("corollary forms of the current") {
    // vertical: I0 = eta (dL/ddu + dL+/ddu)
    const Generator vertical = gen("X1", "0", "cos(t)");
    const Expr slope = partial(kLag1, JetVar::state(0, 1)) +
                       shift(partial(kLag1, JetVar::state(-1, 1)), 1);
    CHECK(canon_zero(noether_current(kLag1, vertical) - P("cos(t)") * slope));

    // horizontal: I0 = xi L - du xi (dL/ddu + dL+/ddu)
    const Generator horizontal = gen("X3", "1", "0");
    CHECK(canon_zero(noether_current(kLag1, horizontal) -
                     (kLag1 - P("du") * slope)));
}
