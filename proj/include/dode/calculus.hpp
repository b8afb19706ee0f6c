#pragma once

#include <string>
#include <utility>

#include "dode/expr.hpp"

namespace dode {

// ---------------------------------------------------------------------------
// Shifts and total derivatives on the delay jet space
// ---------------------------------------------------------------------------

/// Relabel every jet variable k levels to the right (k may be negative).
/// Throws LevelOverflowError naming the offending variable when a level
/// would leave [-2, +2].
Expr shift(const Expr& e, int k);

/// Total derivative acting at a single shift level:
///   D_k = d/dt_k + du_k d/du_k + ddu_k d/ddu_k + dddu_k d/dddu_k.
/// Variables at other levels are constants for D_k.  Throws
/// OrderOverflowError if e depends on a third-order variable at that level.
Expr total_derivative_at(const Expr& e, int level);

/// Full derivative along trajectories: the sum of D_k over all levels,
/// using dt_k/dt = 1 for constant delays.
Expr full_derivative(const Expr& e);

/// Substitute t_k -> t + k*tau for every shifted time variable.
Expr resolve_time_levels(const Expr& e);

// ---------------------------------------------------------------------------
// Point symmetry generators
// ---------------------------------------------------------------------------

/// Point symmetry generator X = xi(t,u) d/dt + eta(t,u) d/du.  Coefficients
/// may reference only the level-0 variables t and u (plus constants).
struct Generator {
    Expr xi;
    Expr eta;
    std::string name;
};

Generator make_generator(std::string name, Expr xi, Expr eta);
Generator operator+(const Generator& a, const Generator& b);

/// Apply the generator prolonged over every level present in e, with
/// first- and second-derivative coefficients
///   zeta1_k = D_k(eta_k) - du_k D_k(xi_k),
///   zeta2_k = D_k(zeta1_k) - ddu_k D_k(xi_k).
/// Prolongation depth is two; third-order variables may appear only as
/// output of the full derivative and cannot be prolonged over.
Expr prolong(const Generator& g, const Expr& e);

// ---------------------------------------------------------------------------
// Variational derivatives for delay Lagrangians
// ---------------------------------------------------------------------------

/// Check that L depends only on (t, t_m, u, u_m, du, du_m).
void require_lagrangian_arguments(const Expr& L);

/// Delay analogue of the Euler-Lagrange expression:
///   dL/du - Dbar(dL/ddu) + S_+( dL/du_m - Dbar(dL/ddu_m) ),
/// whose vanishing is the stationarity equation under vertical variation.
Expr elsgolts_derivative(const Expr& L);

/// Horizontal variational derivative:
///   dL/dt + dL+/dt + Dbar(du dL/ddu) + Dbar(du dL+/ddu) - Dbar(L),
/// with L+ = S_+(L); its vanishing is the stationarity equation under
/// time-direction variation.
Expr horizontal_derivative(const Expr& L);

/// xi * horizontal + eta * elsgolts: the equation singled out by varying
/// the action along the orbit of the given generator.
Expr local_extremal(const Expr& L, const Generator& g);

// ---------------------------------------------------------------------------
// Affine solving (shared by the equation-restriction machinery)
// ---------------------------------------------------------------------------

/// Split e = a*v + b where neither a nor b contains v.  Throws
/// NonAffineError when e is not affine in v (including occurrences inside
/// function arguments or power bases).
std::pair<Expr, Expr> affine_parts(const Expr& e, const JetVar& v);

/// Solve e == 0 for v: returns -b/a.  Throws NonAffineError (as above) or
/// when the coefficient of v is identically zero.
Expr solve_affine(const Expr& e, const JetVar& v);

/// True when e is affine in v with a nonzero coefficient.
bool is_affine_in(const Expr& e, const JetVar& v);

}  // namespace dode
