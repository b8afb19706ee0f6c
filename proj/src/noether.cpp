#include "dode/noether.hpp"

namespace dode {

namespace {

Expr invariance_criterion(const Expr& L, const Generator& g) {
    return prolong(g, L) + L * total_derivative_at(g.xi, 0);
}

void require_lemma_hypotheses(const Generator& g) {
    for (const JetVar& v : jet_vars(g.xi))
        if (!v.is_time())
            throw HypothesisError("xi must not depend on u (generator " + g.name + ")");
    const JetVar t = JetVar::time(0);
    if (!partial(partial(g.xi, t), t).is_zero()) {
        const RegularityCheck reg = check_regularity(g);
        throw HypothesisError("xi must be affine in t (generator " + g.name +
                              "); mesh regularity residual = " + to_string(reg.residual));
    }
}

}  // namespace

Expr noether_current(const Expr& L, const Generator& g) {
    require_lagrangian_arguments(L);
    const Expr du(JetVar::state(0, 1));
    const JetVar du_v = JetVar::state(0, 1);
    const JetVar dum_v = JetVar::state(-1, 1);
    const Expr slope = partial(L, du_v) + shift(partial(L, dum_v), 1);
    return g.xi * L + (g.eta - du * g.xi) * slope;
}

std::pair<Expr, Expr> difference_relation(const Expr& L, const Generator& g) {
    require_lagrangian_arguments(L);
    const Expr xi_m = shift(g.xi, -1);
    const Expr eta_m = shift(g.eta, -1);
    const Expr dum(JetVar::state(-1, 1));
    const Expr lhs = xi_m * partial(L, JetVar::time(-1)) +
                     eta_m * partial(L, JetVar::state(-1, 0)) +
                     (total_derivative_at(eta_m, -1) - dum * total_derivative_at(xi_m, -1)) *
                         partial(L, JetVar::state(-1, 1));
    return {lhs, shift(lhs, 1)};
}

IdentityCheck verify_master_identity(const Expr& L, const Generator& g,
                                     const ZeroOptions& opt) {
    require_lagrangian_arguments(L);
    const Expr crit = invariance_criterion(L, g);
    const Expr e_part = g.eta * elsgolts_derivative(L);
    const Expr h_part = g.xi * horizontal_derivative(L);
    const Expr current = full_derivative(noether_current(L, g));
    const auto [lhs, rhs] = difference_relation(L, g);
    IdentityCheck c;
    c.residual = crit - e_part - h_part - current - (lhs - rhs);
    c.certificate = check_zero(c.residual, opt);
    return c;
}

IdentityCheck verify_lemma2(const Expr& L, const Generator& g, const ZeroOptions& opt) {
    require_lagrangian_arguments(L);
    require_lemma_hypotheses(g);
    const Expr action = invariance_criterion(L, g);  // X(L) + L D(xi)
    const Expr e_of_l = elsgolts_derivative(L);
    const JetVar u = JetVar::state(0, 0);
    const Expr du(JetVar::state(0, 1));
    const Expr factor = partial(g.eta, u) + total_derivative_at(g.xi, 0) - du * partial(g.xi, u);
    IdentityCheck c;
    c.residual = elsgolts_derivative(action) - prolong(g, e_of_l) - factor * e_of_l;
    c.certificate = check_zero(c.residual, opt);
    return c;
}

RestrictedCheck check_elsgolts_invariance_criterion(const Expr& L, const Generator& g,
                                                    const ZeroOptions& opt) {
    require_lagrangian_arguments(L);
    require_lemma_hypotheses(g);
    const Expr action = invariance_criterion(L, g);
    const Expr lhs = elsgolts_derivative(action);
    const Expr equation = elsgolts_derivative(L);
    RestrictedCheck c;
    c.leading = pick_equation_leading(equation);
    Substitution s;
    s.jets.emplace(c.leading, solve_affine(equation, c.leading));
    c.restricted = substitute(lhs, s);
    c.certificate = check_zero(c.restricted, opt);
    c.holds = c.certificate.zero;
    return c;
}

NoetherPackage build_noether_package(const Expr& L, const Generator& g,
                                     const NoetherOptions& opt) {
    NoetherPackage p;
    p.invariance = lagrangian_invariance(L, g, opt.basis, opt.zero);
    if (p.invariance.verdict != Verdict::StrictlyInvariant &&
        p.invariance.verdict != Verdict::DivergenceInvariant)
        throw Error("Lagrangian is not invariant under " + g.name +
                    "; criterion = " + to_string(p.invariance.criterion_value));

    p.integral = noether_current(L, g);
    if (p.invariance.divergence_witness) {
        p.divergence_correction_a = p.invariance.divergence_witness;
        p.integral = p.integral - *p.divergence_correction_a;
    }

    std::tie(p.relation_lhs, p.relation_rhs) = difference_relation(L, g);
    const Expr gap = p.relation_rhs - p.relation_lhs;
    p.relation_trivial = is_zero_canonical(gap).zero;
    p.restriction_free = p.relation_trivial;

    if (!p.relation_trivial && opt.absorb_difference) {
        std::vector<Expr> fallback;
        const std::vector<Expr>* basis = &opt.basis;
        if (basis->empty()) {
            fallback = default_divergence_basis();
            basis = &fallback;
        }
        if (auto c = find_divergence_witness(gap, *basis)) {
            p.difference_correction_c = *c;
            p.integral = p.integral - *c;
            p.restriction_free = true;
        }
    }

    p.local_extremal_eq = local_extremal(L, g);

    std::vector<std::pair<Expr, JetVar>> relations;
    relations.emplace_back(p.local_extremal_eq, pick_equation_leading(p.local_extremal_eq));
    if (!p.restriction_free) relations.emplace_back(gap, pick_relation_variable(gap));
    p.reduction_certificate =
        check_zero(reduce_modulo(full_derivative(p.integral), relations), opt.zero);
    return p;
}

Expr reduce_modulo(const Expr& e, const std::vector<std::pair<Expr, JetVar>>& relations) {
    Expr out = e;
    for (const auto& [relation, var] : relations) {
        if (!contains(out, var)) continue;
        Substitution s;
        s.jets.emplace(var, solve_affine(relation, var));
        out = substitute(out, s);
    }
    return out;
}

}  // namespace dode
