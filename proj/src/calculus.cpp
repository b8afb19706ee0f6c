#include "dode/calculus.hpp"

namespace dode {

// ---------------------------------------------------------------------------
// Shifts
// ---------------------------------------------------------------------------

Expr shift(const Expr& e, int k) {
    if (k == 0) return e;
    Substitution s;
    for (const JetVar& v : jet_vars(e)) {
        const int nl = v.level + k;
        if (nl < JetVar::kMinLevel || nl > JetVar::kMaxLevel)
            throw LevelOverflowError("shift by " + std::to_string(k) +
                                     " moves " + v.token() + " outside the level range");
        s.jets.emplace(v, Expr(v.is_time() ? JetVar::time(nl) : JetVar::state(nl, v.order)));
    }
    return substitute(e, s);
}

// ---------------------------------------------------------------------------
// Total derivatives
// ---------------------------------------------------------------------------

Expr total_derivative_at(const Expr& e, int level) {
    if (level < JetVar::kMinLevel || level > JetVar::kMaxLevel)
        throw ValidationError("derivative level out of range");
    const JetVar top = JetVar::state(level, JetVar::kMaxOrder);
    if (!partial(e, top).is_zero())
        throw OrderOverflowError("total derivative of " + top.token() +
                                 " would need a fourth-order variable");
    Expr out = partial(e, JetVar::time(level));
    for (int order = 0; order < JetVar::kMaxOrder; ++order) {
        Expr p = partial(e, JetVar::state(level, order));
        if (p.is_zero()) continue;
        out = out + Expr(JetVar::state(level, order + 1)) * p;
    }
    return out;
}

Expr full_derivative(const Expr& e) {
    Expr out;
    for (int level = JetVar::kMinLevel; level <= JetVar::kMaxLevel; ++level)
        out = out + total_derivative_at(e, level);
    return out;
}

Expr resolve_time_levels(const Expr& e) {
    Substitution s;
    const Expr t(JetVar::time(0));
    const Expr tau = Expr::symbol("tau");
    for (int level = JetVar::kMinLevel; level <= JetVar::kMaxLevel; ++level) {
        if (level == 0) continue;
        s.jets.emplace(JetVar::time(level), t + Expr(level) * tau);
    }
    return substitute(e, s);
}

// ---------------------------------------------------------------------------
// Generators and prolongation
// ---------------------------------------------------------------------------

Generator make_generator(std::string name, Expr xi, Expr eta) {
    for (const Expr* c : {&xi, &eta}) {
        for (const JetVar& v : jet_vars(*c)) {
            if (v.level != 0 || (!v.is_time() && v.order != 0))
                throw ValidationError("generator coefficients may reference only t and u; found " +
                                      v.token() + " in generator " + name);
        }
    }
    return Generator{std::move(xi), std::move(eta), std::move(name)};
}

Generator operator+(const Generator& a, const Generator& b) {
    return Generator{a.xi + b.xi, a.eta + b.eta, a.name + "+" + b.name};
}

Expr prolong(const Generator& g, const Expr& e) {
    for (const JetVar& v : jet_vars(e))
        if (!v.is_time() && v.order >= JetVar::kMaxOrder)
            throw OrderOverflowError("prolongation depth is two; cannot act on " + v.token());

    Expr out;
    for (int level = JetVar::kMinLevel; level <= JetVar::kMaxLevel; ++level) {
        const Expr dt = partial(e, JetVar::time(level));
        const Expr du0 = partial(e, JetVar::state(level, 0));
        const Expr du1 = partial(e, JetVar::state(level, 1));
        const Expr du2 = partial(e, JetVar::state(level, 2));
        if (dt.is_zero() && du0.is_zero() && du1.is_zero() && du2.is_zero()) continue;

        const Expr xi_k = shift(g.xi, level);
        const Expr eta_k = shift(g.eta, level);
        if (!dt.is_zero()) out = out + xi_k * dt;
        if (!du0.is_zero()) out = out + eta_k * du0;
        if (du1.is_zero() && du2.is_zero()) continue;

        const Expr dxi = total_derivative_at(xi_k, level);
        const Expr zeta1 =
            total_derivative_at(eta_k, level) - Expr(JetVar::state(level, 1)) * dxi;
        if (!du1.is_zero()) out = out + zeta1 * du1;
        if (du2.is_zero()) continue;

        const Expr zeta2 =
            total_derivative_at(zeta1, level) - Expr(JetVar::state(level, 2)) * dxi;
        out = out + zeta2 * du2;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variational derivatives
// ---------------------------------------------------------------------------

void require_lagrangian_arguments(const Expr& L) {
    for (const JetVar& v : jet_vars(L)) {
        const bool level_ok = v.level == 0 || v.level == -1;
        const bool order_ok = v.is_time() || v.order <= 1;
        if (!level_ok || !order_ok)
            throw ValidationError("a delay Lagrangian may depend on (t, t_m, u, u_m, du, du_m) "
                                  "only; found " + v.token());
    }
}

Expr elsgolts_derivative(const Expr& L) {
    require_lagrangian_arguments(L);
    const JetVar u = JetVar::state(0, 0), du = JetVar::state(0, 1);
    const JetVar um = JetVar::state(-1, 0), dum = JetVar::state(-1, 1);
    const Expr here = partial(L, u) - full_derivative(partial(L, du));
    const Expr there = partial(L, um) - full_derivative(partial(L, dum));
    return here + shift(there, 1);
}

Expr horizontal_derivative(const Expr& L) {
    require_lagrangian_arguments(L);
    const Expr Lp = shift(L, 1);
    const JetVar t = JetVar::time(0);
    const Expr du(JetVar::state(0, 1));
    const JetVar du_v = JetVar::state(0, 1);
    Expr out = partial(L, t) + partial(Lp, t);
    out = out + full_derivative(du * partial(L, du_v));
    out = out + full_derivative(du * partial(Lp, du_v));
    out = out - full_derivative(L);
    return out;
}

Expr local_extremal(const Expr& L, const Generator& g) {
    Expr out;
    if (!g.xi.is_zero()) out = out + g.xi * horizontal_derivative(L);
    if (!g.eta.is_zero()) out = out + g.eta * elsgolts_derivative(L);
    if (g.xi.is_zero() && g.eta.is_zero()) require_lagrangian_arguments(L);
    return out;
}

// ---------------------------------------------------------------------------
// Affine solving
// ---------------------------------------------------------------------------

namespace {

bool occurs_inside_composite(const Expr& e, const JetVar& v) {
    for (const Term& t : e.data().terms) {
        for (const Factor& f : t.mono.factors) {
            if (const auto* fn = std::get_if<FuncAtom>(&f.atom)) {
                if (contains(fn->arg, v)) return true;
            } else if (const auto* pb = std::get_if<PowBase>(&f.atom)) {
                if (contains(pb->base, v)) return true;
            }
        }
    }
    return false;
}

}  // namespace

bool is_affine_in(const Expr& e, const JetVar& v) {
    if (!contains(e, v)) return false;
    if (occurs_inside_composite(e, v)) return false;
    for (const Rational& exp : occurring_exponents(e, v))
        if (!exp.is_zero() && !exp.is_one()) return false;
    return true;
}

std::pair<Expr, Expr> affine_parts(const Expr& e, const JetVar& v) {
    if (occurs_inside_composite(e, v))
        throw NonAffineError(v.token() + " occurs inside a function argument or power base");
    for (const Rational& exp : occurring_exponents(e, v))
        if (!exp.is_zero() && !exp.is_one())
            throw NonAffineError("expression is not affine in " + v.token());
    const Expr a = partial(e, v);
    const Expr b = e - a * Expr(v);
    return {a, b};
}

Expr solve_affine(const Expr& e, const JetVar& v) {
    auto [a, b] = affine_parts(e, v);
    if (a.is_zero())
        throw NonAffineError("coefficient of " + v.token() + " is identically zero");
    return -b / a;
}

}  // namespace dode
