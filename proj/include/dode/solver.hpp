#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dode/calculus.hpp"
#include "dode/expr.hpp"

namespace dode {

// ---------------------------------------------------------------------------
// Explicit form of a second-order equation with delays tau and 2*tau
// ---------------------------------------------------------------------------

struct ExplicitDODE {
    Expr rhs;                // F with arguments at levels -2..0, no ddu at level 0
    double tau = 1.0;
    bool two_delays = true;  // false when nothing at level -2 enters F
};

/// Bring an equation in vanishing form to ddu = F: shift down so the highest
/// occurring level is zero, then solve affinely for ddu.  Throws
/// NonAffineError when the equation is nonlinear in its leading second
/// derivative or the leading coefficient vanishes identically.
ExplicitDODE normalize(const Expr& equation, double tau);

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

/// Smooth history on [t0 - 2*tau, t0], with derivatives taken symbolically.
struct History {
    Expr position;
    Expr velocity;
    Expr acceleration;
    double t0 = 0.0;
};

History make_history(const Expr& phi, double t0);

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

/// Grid solution with nodes t0 + i*tau/m for i in [-2m, steps].  Node times
/// are derived from the integer index so delayed lookups are grid-aligned
/// exactly.  u and du are continuous across steps; ddu holds right limits
/// at the junction points.  Immutable after integration.
struct Trajectory {
    double t0 = 0.0;
    double tau = 1.0;
    int m = 0;      // steps per delay
    int steps = 0;  // nodes beyond t0

    std::vector<double> u, du, ddu;  // node i stored at slot i + 2m

    double time(int node) const { return t0 + tau * static_cast<double>(node) / m; }
    int first_node() const { return -2 * m; }
    int last_node() const { return steps; }
    double value(int node, int order) const;
};

/// Classical fourth-order Runge-Kutta on (u, du) with step tau/m, solved
/// interval by interval; delayed values at stage midpoints come from
/// quintic Hermite dense output of completed steps, delayed node values
/// from the grid, and anything at or before t0 from the history.
Trajectory integrate(const ExplicitDODE& dode, const History& history, double t_end,
                     int m, const std::map<std::string, double>& constants = {});

void write_trajectory(const Trajectory& traj, std::ostream& os);

// ---------------------------------------------------------------------------
// Monitors
// ---------------------------------------------------------------------------

struct MonitorWindow {
    int node_lo = 0;
    int node_hi = 0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int nodes = 0;
};

struct DriftReport {
    MonitorWindow window;
    double reference = 0.0;  // value at the first window node
    double max_drift = 0.0;  // max |I - reference|
};

/// Constancy of a differential first integral along the trajectory.  The
/// window is derived from the levels occurring in the expression so that
/// every shifted lookup lands on a stored node.
DriftReport monitor_differential(const Trajectory& traj, const Expr& integral,
                                 const std::map<std::string, double>& constants = {});

struct PeriodicityReport {
    MonitorWindow window;    // nodes where both J(t) and J(t + tau) exist
    double max_deviation = 0.0;  // max |J(t + tau) - J(t)|
    double max_abs = 0.0;        // max |J(t)| over the window
};

/// Delay-periodicity of a difference first integral.
PeriodicityReport monitor_difference(const Trajectory& traj, const Expr& difference,
                                     const std::map<std::string, double>& constants = {});

struct ResidualReport {
    MonitorWindow window;
    double max_residual = 0.0;
};

/// Pointwise residual of a closed relation (vanishing form, constants bound).
ResidualReport verify_closed_relation(const Trajectory& traj, const Expr& relation,
                                      const std::map<std::string, double>& constants = {});

}  // namespace dode
