#pragma once

#include <optional>
#include <vector>

#include "dode/calculus.hpp"
#include "dode/expr.hpp"

namespace dode {

// ---------------------------------------------------------------------------
// Mesh regularity
// ---------------------------------------------------------------------------

/// xi_p - 2 xi + xi_m with shifted times resolved through t_k = t + k*tau.
/// The generator preserves a uniform delay mesh iff the residual vanishes.
struct RegularityCheck {
    bool ok = false;
    Expr residual;
};

RegularityCheck check_regularity(const Generator& g);

// ---------------------------------------------------------------------------
// Invariance of delay Lagrangians and equations
// ---------------------------------------------------------------------------

enum class Verdict { StrictlyInvariant, DivergenceInvariant, NotInvariant, Undetermined };

const char* verdict_name(Verdict v);

struct InvarianceReport {
    Expr criterion_value;  // prolong(g, L) + L * D(xi)
    Verdict verdict = Verdict::Undetermined;
    std::optional<Expr> divergence_witness;  // A with Dbar(A) = criterion
    ZeroCheck criterion_certificate;
    ZeroCheck witness_certificate;  // meaningful when a witness was found
    bool criterion_nonzero = false;  // certified nonzero (strictness excluded)
    RegularityCheck regularity;
};

/// Candidate summands for divergence witnesses: products of one factor from
/// {1, u, u_m, u_p, du, du_m, du_p} and one from
/// {1, sin t, cos t, sin t_m, cos t_m, t}.
std::vector<Expr> default_divergence_basis();

/// Invariance criterion for the elementary action L dt.  Strict invariance
/// means the criterion vanishes; a divergence witness A with Dbar(A) equal
/// to the criterion yields divergence invariance.  When the criterion is
/// certified nonzero but no witness exists over the basis, the verdict is
/// Undetermined (a witness outside the basis may still exist).
InvarianceReport lagrangian_invariance(const Expr& L, const Generator& g,
                                       const std::vector<Expr>& basis = {},
                                       const ZeroOptions& opt = {});

struct EquationInvariance {
    bool invariant = false;
    JetVar leading;        // derivative the equation was solved for
    Expr restricted;       // prolonged expression on the solution manifold
    ZeroCheck certificate;
    RegularityCheck regularity;
};

/// Invariance of the equation E == 0: the prolonged action of g restricted
/// to the solution manifold (E solved for its leading derivative) must
/// vanish.  Throws NonAffineError when no leading derivative is isolatable.
EquationInvariance dode_invariance(const Expr& equation, const Generator& g,
                                   const ZeroOptions& opt = {});

/// Exact rational solve of sum_i c_i Dbar(basis_i) = target by matching
/// canonical monomials.  Returns A = sum c_i basis_i, or nothing when the
/// linear system is inconsistent.  No least-squares fallback.
std::optional<Expr> find_divergence_witness(const Expr& target,
                                            const std::vector<Expr>& basis);

struct InvariantFunctionCheck {
    std::string generator;
    bool invariant = false;
    ZeroCheck certificate;
};

/// prolong(g, I) == 0 for each generator of the algebra.
std::vector<InvariantFunctionCheck> check_invariant_function(
    const Expr& invariant, const std::vector<Generator>& algebra,
    const ZeroOptions& opt = {});

/// Selection rules shared with the reduction machinery.
JetVar pick_equation_leading(const Expr& equation);   // order desc, level desc
JetVar pick_relation_variable(const Expr& relation);  // level desc, order desc

}  // namespace dode
