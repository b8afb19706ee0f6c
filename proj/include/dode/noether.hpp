#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dode/symmetry.hpp"

namespace dode {

// ---------------------------------------------------------------------------
// Operator identities
// ---------------------------------------------------------------------------

struct IdentityCheck {
    Expr residual;
    ZeroCheck certificate;
};

/// The master operator identity linking the invariance criterion, the
/// variational derivatives, the conserved current and the two-point
/// difference part.  Holds for arbitrary smooth L, xi, eta with constant
/// delay; the returned residual should certify zero.
IdentityCheck verify_master_identity(const Expr& L, const Generator& g,
                                     const ZeroOptions& opt = {});

/// Commutation identity between the Elsgolts variational derivative and a
/// generator with xi = xi(t) affine (so that d(xi)/dt is the same at
/// shifted points).  Throws HypothesisError when xi depends on u or is not
/// affine in t.
IdentityCheck verify_lemma2(const Expr& L, const Generator& g,
                            const ZeroOptions& opt = {});

struct RestrictedCheck {
    bool holds = false;
    JetVar leading;
    Expr restricted;
    ZeroCheck certificate;
};

/// Necessary and sufficient invariance condition for the Elsgolts equation:
/// the Elsgolts derivative of X(L) + L D(xi), restricted to the solution
/// manifold of the Elsgolts equation, must vanish.  Hypotheses as in
/// verify_lemma2.
RestrictedCheck check_elsgolts_invariance_criterion(const Expr& L, const Generator& g,
                                                    const ZeroOptions& opt = {});

// ---------------------------------------------------------------------------
// Construction of first integrals
// ---------------------------------------------------------------------------

/// The conserved current xi L + (eta - du xi)(dL/ddu + dL+/ddu) before any
/// divergence corrections.
Expr noether_current(const Expr& L, const Generator& g);

/// Two sides of the difference relation attached to the integral; the
/// right-hand side is the shift of the left-hand side.
std::pair<Expr, Expr> difference_relation(const Expr& L, const Generator& g);

struct NoetherPackage {
    Expr integral;                    // with corrections applied
    Expr relation_lhs;
    Expr relation_rhs;
    bool relation_trivial = false;    // lhs - rhs is identically zero
    std::optional<Expr> divergence_correction_a;  // subtracted from current
    std::optional<Expr> difference_correction_c;  // subtracted when absorbed
    bool restriction_free = false;
    Expr local_extremal_eq;
    InvarianceReport invariance;
    ZeroCheck reduction_certificate;  // Dbar(integral) == 0 modulo equation(+relation)
};

struct NoetherOptions {
    std::vector<Expr> basis;          // witness basis; defaults when empty
    bool absorb_difference = false;   // try to trade the relation for -C
    ZeroOptions zero;
};

/// Build the differential first integral and its companion difference
/// relation for an invariant Lagrangian.  With absorb_difference set, a
/// witness C with Dbar(C) = rhs - lhs (over the basis) is subtracted from
/// the integral and the relation is absorbed, leaving no restriction on
/// the solution set.  Throws Error when the Lagrangian is not (divergence)
/// invariant under g.
NoetherPackage build_noether_package(const Expr& L, const Generator& g,
                                     const NoetherOptions& opt = {});

// ---------------------------------------------------------------------------
// Reduction modulo relations
// ---------------------------------------------------------------------------

/// Substitute each relation (vanishing form) solved for its designated
/// variable, in order, then simplify.  Each relation must be affine in its
/// variable.
Expr reduce_modulo(const Expr& e, const std::vector<std::pair<Expr, JetVar>>& relations);

}  // namespace dode
