#include "dode/symmetry.hpp"

#include <algorithm>

namespace dode {

RegularityCheck check_regularity(const Generator& g) {
    const Expr raw = shift(g.xi, 1) - Expr(2) * g.xi + shift(g.xi, -1);
    RegularityCheck c;
    c.residual = resolve_time_levels(raw);
    c.ok = is_zero_canonical(c.residual).zero;
    return c;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::StrictlyInvariant: return "strictly-invariant";
        case Verdict::DivergenceInvariant: return "divergence-invariant";
        case Verdict::NotInvariant: return "not-invariant";
        case Verdict::Undetermined: return "undetermined";
    }
    return "?";
}

std::vector<Expr> default_divergence_basis() {
    const Expr t(JetVar::time(0));
    const Expr tm(JetVar::time(-1));
    std::vector<Expr> states = {Expr(1),
                                Expr(JetVar::state(0, 0)),
                                Expr(JetVar::state(-1, 0)),
                                Expr(JetVar::state(1, 0)),
                                Expr(JetVar::state(0, 1)),
                                Expr(JetVar::state(-1, 1)),
                                Expr(JetVar::state(1, 1))};
    std::vector<Expr> times = {Expr(1), sin(t), cos(t), sin(tm), cos(tm), t};
    std::vector<Expr> basis;
    for (const Expr& s : states)
        for (const Expr& w : times) {
            Expr b = s * w;
            if (b.is_rational()) continue;  // constants have zero derivative
            basis.push_back(b);
        }
    return basis;
}

InvarianceReport lagrangian_invariance(const Expr& L, const Generator& g,
                                       const std::vector<Expr>& basis,
                                       const ZeroOptions& opt) {
    require_lagrangian_arguments(L);
    InvarianceReport r;
    r.regularity = check_regularity(g);
    r.criterion_value = prolong(g, L) + L * total_derivative_at(g.xi, 0);

    bool classified = true;
    try {
        r.criterion_certificate = check_zero(r.criterion_value, opt);
    } catch (const EvalError&) {
        classified = false;
    }
    if (classified && r.criterion_certificate.zero) {
        r.verdict = Verdict::StrictlyInvariant;
        return r;
    }
    r.criterion_nonzero = classified;

    std::vector<Expr> fallback;
    const std::vector<Expr>* use = &basis;
    if (basis.empty()) {
        fallback = default_divergence_basis();
        use = &fallback;
    }
    if (auto witness = find_divergence_witness(r.criterion_value, *use)) {
        r.divergence_witness = *witness;
        r.witness_certificate =
            is_zero_canonical(r.criterion_value - full_derivative(*witness));
        r.verdict = Verdict::DivergenceInvariant;
        return r;
    }
    r.verdict = Verdict::Undetermined;
    return r;
}

JetVar pick_equation_leading(const Expr& equation) {
    // Only derivatives of the maximal order qualify as the leading one.
    int max_order = -1;
    for (const JetVar& v : jet_vars(equation))
        if (!v.is_time()) max_order = std::max(max_order, int(v.order));
    if (max_order < 0) throw NonAffineError("equation contains no state variables");
    std::vector<JetVar> candidates;
    for (const JetVar& v : jet_vars(equation))
        if (!v.is_time() && v.order == max_order) candidates.push_back(v);
    std::sort(candidates.begin(), candidates.end(),
              [](const JetVar& a, const JetVar& b) { return a.level > b.level; });
    for (const JetVar& v : candidates)
        if (is_affine_in(equation, v)) return v;
    throw NonAffineError("the leading derivative of the equation is not isolatable");
}

JetVar pick_relation_variable(const Expr& relation) {
    std::vector<JetVar> candidates;
    for (const JetVar& v : jet_vars(relation))
        if (!v.is_time()) candidates.push_back(v);
    std::sort(candidates.begin(), candidates.end(), [](const JetVar& a, const JetVar& b) {
        if (a.level != b.level) return a.level > b.level;
        return a.order > b.order;
    });
    for (const JetVar& v : candidates)
        if (is_affine_in(relation, v)) return v;
    throw NonAffineError("no variable of the relation is isolatable");
}

EquationInvariance dode_invariance(const Expr& equation, const Generator& g,
                                   const ZeroOptions& opt) {
    EquationInvariance r;
    r.regularity = check_regularity(g);
    const Expr prolonged = prolong(g, equation);
    r.leading = pick_equation_leading(equation);
    const Expr sol = solve_affine(equation, r.leading);
    Substitution s;
    s.jets.emplace(r.leading, sol);
    r.restricted = substitute(prolonged, s);
    r.certificate = check_zero(r.restricted, opt);
    r.invariant = r.certificate.zero;
    return r;
}

// ---------------------------------------------------------------------------
// Divergence witness search: exact linear algebra over the rationals
// ---------------------------------------------------------------------------

namespace {

struct MonoLess {
    bool operator()(const Mono& a, const Mono& b) const { return cmp(a, b) < 0; }
};

}  // namespace

std::optional<Expr> find_divergence_witness(const Expr& target,
                                            const std::vector<Expr>& basis) {
    if (basis.empty()) return std::nullopt;
    if (target.is_zero()) return Expr(0);

    std::vector<Expr> derived;
    derived.reserve(basis.size());
    for (const Expr& b : basis) derived.push_back(full_derivative(b));

    std::map<Mono, std::size_t, MonoLess> rows;
    auto row_of = [&](const Mono& m) {
        auto [it, inserted] = rows.emplace(m, rows.size());
        return it->second;
    };
    for (const Expr& d : derived)
        for (const Term& t : d.data().terms) row_of(t.mono);
    for (const Term& t : target.data().terms) row_of(t.mono);

    const std::size_t nrows = rows.size();
    const std::size_t ncols = basis.size();
    std::vector<std::vector<Rational>> a(nrows, std::vector<Rational>(ncols, Rational(0)));
    std::vector<Rational> rhs(nrows, Rational(0));
    for (std::size_t j = 0; j < ncols; ++j)
        for (const Term& t : derived[j].data().terms) a[row_of(t.mono)][j] = t.coeff;
    for (const Term& t : target.data().terms) rhs[row_of(t.mono)] = t.coeff;

    // Gauss-Jordan elimination.
    std::vector<long long> pivot_of_col(ncols, -1);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < nrows; ++col) {
        std::size_t piv = rank;
        while (piv < nrows && a[piv][col].is_zero()) ++piv;
        if (piv == nrows) continue;
        std::swap(a[piv], a[rank]);
        std::swap(rhs[piv], rhs[rank]);
        const Rational inv = Rational(1) / a[rank][col];
        for (auto& x : a[rank]) x *= inv;
        rhs[rank] *= inv;
        for (std::size_t r = 0; r < nrows; ++r) {
            if (r == rank || a[r][col].is_zero()) continue;
            const Rational f = a[r][col];
            for (std::size_t c = 0; c < ncols; ++c) a[r][c] -= f * a[rank][c];
            rhs[r] -= f * rhs[rank];
        }
        pivot_of_col[col] = static_cast<long long>(rank);
        ++rank;
    }
    for (std::size_t r = rank; r < nrows; ++r)
        if (!rhs[r].is_zero()) return std::nullopt;  // inconsistent

    Expr witness;
    for (std::size_t col = 0; col < ncols; ++col) {
        if (pivot_of_col[col] < 0) continue;  // free coefficient: take zero
        const Rational c = rhs[static_cast<std::size_t>(pivot_of_col[col])];
        if (!c.is_zero()) witness = witness + Expr(c) * basis[col];
    }
    if (!is_zero_canonical(target - full_derivative(witness)).zero) return std::nullopt;
    return witness;
}

std::vector<InvariantFunctionCheck> check_invariant_function(
    const Expr& invariant, const std::vector<Generator>& algebra, const ZeroOptions& opt) {
    std::vector<InvariantFunctionCheck> out;
    out.reserve(algebra.size());
    for (const Generator& g : algebra) {
        InvariantFunctionCheck c;
        c.generator = g.name;
        c.certificate = check_zero(prolong(g, invariant), opt);
        c.invariant = c.certificate.zero;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace dode
