#include "dode/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace dode {

// ---------------------------------------------------------------------------
// normalize
// ---------------------------------------------------------------------------

ExplicitDODE normalize(const Expr& equation, double tau) {
    int max_level = JetVar::kMinLevel;
    for (const JetVar& v : jet_vars(equation)) max_level = std::max(max_level, int(v.level));
    Expr eq = equation;
    if (max_level > 0) eq = shift(eq, -max_level);

    const JetVar ddu = JetVar::state(0, 2);
    if (!contains(eq, ddu))
        throw NonAffineError("equation has no second derivative at level 0 after shifting");
    Expr rhs = solve_affine(eq, ddu);  // throws when nonlinear or coefficient vanishes

    for (const JetVar& v : jet_vars(rhs)) {
        if (v.level > 0)
            throw ValidationError("normalized right-hand side references future level: " +
                                  v.token());
        if (!v.is_time() && v.order > 2)
            throw ValidationError("normalized right-hand side references " + v.token());
    }

    ExplicitDODE out;
    out.rhs = rhs;
    out.tau = tau;
    out.two_delays = !partial(rhs, JetVar::state(-2, 0)).is_zero() ||
                     !partial(rhs, JetVar::state(-2, 1)).is_zero() ||
                     !partial(rhs, JetVar::state(-2, 2)).is_zero();
    return out;
}

// ---------------------------------------------------------------------------
// History
// ---------------------------------------------------------------------------

History make_history(const Expr& phi, double t0) {
    for (const JetVar& v : jet_vars(phi))
        if (!(v.is_time() && v.level == 0))
            throw ValidationError("history must be a function of t only; found " + v.token());
    History h;
    h.position = phi;
    h.velocity = partial(phi, JetVar::time(0));
    h.acceleration = partial(h.velocity, JetVar::time(0));
    h.t0 = t0;
    return h;
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

double Trajectory::value(int node, int order) const {
    if (node < first_node() || node > last_node())
        throw Error("trajectory lookup outside the stored grid: node " + std::to_string(node));
    const int slot = node + 2 * m;
    switch (order) {
        case 0: return u[static_cast<std::size_t>(slot)];
        case 1: return du[static_cast<std::size_t>(slot)];
        case 2: return ddu[static_cast<std::size_t>(slot)];
        default: throw ValidationError("trajectory stores derivative orders 0..2 only");
    }
}

namespace {

// Quintic two-point Hermite interpolant on one step of width h.
struct Quintic {
    double y0, d0h, a0h2, c3, c4, c5, h;

    Quintic(double y0_, double d0, double a0, double y1, double d1, double a1, double h_)
        : y0(y0_), d0h(d0 * h_), a0h2(a0 * h_ * h_), h(h_) {
        const double A = y1 - y0 - d0h - a0h2 / 2.0;
        const double B = (d1 - d0 - a0 * h) * h;
        const double C = (a1 - a0) * h * h;
        c3 = 10.0 * A - 4.0 * B + C / 2.0;
        c4 = -15.0 * A + 7.0 * B - C;
        c5 = 6.0 * A - 3.0 * B + C / 2.0;
    }

    double value(double th) const {
        return y0 + d0h * th + a0h2 * th * th / 2.0 + th * th * th * (c3 + th * (c4 + th * c5));
    }
    double deriv(double th) const {
        return (d0h + a0h2 * th + th * th * (3.0 * c3 + th * (4.0 * c4 + 5.0 * th * c5))) / h;
    }
    double accel(double th) const {
        return (a0h2 + th * (6.0 * c3 + th * (12.0 * c4 + 20.0 * th * c5))) / (h * h);
    }
};

struct HistoryEval {
    const History* h;
    std::map<std::string, double> consts;

    double at(double t, int order) const {
        EvalPoint pt;
        pt.jets[JetVar::time(0)] = t;
        pt.consts = consts;
        const Expr* e = order == 0 ? &h->position : order == 1 ? &h->velocity
                                                               : &h->acceleration;
        return eval_numeric(*e, pt);
    }
};

constexpr double kGridEps = 1e-9;

}  // namespace

Trajectory integrate(const ExplicitDODE& dode, const History& history, double t_end,
                     int m, const std::map<std::string, double>& constants) {
    if (m < 4) throw ValidationError("steps per delay must be at least 4");
    if (dode.tau <= 0) throw ValidationError("tau must be positive");
    if (t_end < history.t0 - 1e-12) throw ValidationError("t_end precedes t0");

    Trajectory traj;
    traj.t0 = history.t0;
    traj.tau = dode.tau;
    traj.m = m;
    const double h = dode.tau / m;
    traj.steps = static_cast<int>(std::ceil((t_end - history.t0) / h - kGridEps));
    if (traj.steps < 0) traj.steps = 0;

    const std::size_t total = static_cast<std::size_t>(traj.steps + 2 * m + 1);
    traj.u.assign(total, 0.0);
    traj.du.assign(total, 0.0);
    traj.ddu.assign(total, 0.0);

    std::map<std::string, double> consts = constants;
    consts["tau"] = dode.tau;
    HistoryEval hist{&history, consts};

    for (int i = -2 * m; i <= 0; ++i) {
        const double t = traj.time(i);
        const std::size_t slot = static_cast<std::size_t>(i + 2 * m);
        traj.u[slot] = hist.at(t, 0);
        traj.du[slot] = hist.at(t, 1);
        traj.ddu[slot] = hist.at(t, 2);
    }

    const std::set<JetVar> needed = jet_vars(dode.rhs);

    // Delayed state lookup at grid position pos = i + s + level*m (in units
    // of h): history for pos <= 0, stored nodes at integer positions, dense
    // output of the enclosing completed step otherwise.
    auto lookup = [&](double pos, int order) -> double {
        if (pos < -2.0 * m - kGridEps)
            throw Error("delayed lookup before the start of the history interval");
        if (pos <= kGridEps) return hist.at(traj.t0 + traj.tau * pos / m, order);
        const double rounded = std::nearbyint(pos);
        if (std::abs(pos - rounded) < kGridEps)
            return traj.value(static_cast<int>(rounded), order);
        const int j = static_cast<int>(std::floor(pos));
        const double th = pos - j;
        const Quintic q(traj.value(j, 0), traj.value(j, 1), traj.value(j, 2),
                        traj.value(j + 1, 0), traj.value(j + 1, 1), traj.value(j + 1, 2), h);
        switch (order) {
            case 0: return q.value(th);
            case 1: return q.deriv(th);
            default: return q.accel(th);
        }
    };

    auto rhs_at = [&](int i, double s, double uv, double duv) -> double {
        EvalPoint pt;
        pt.consts = consts;
        const double t = traj.time(i) + s * h;
        for (const JetVar& v : needed) {
            if (v.is_time()) {
                pt.jets[v] = t + v.level * dode.tau;
            } else if (v.level == 0) {
                if (v.order > 1)
                    throw ValidationError("right-hand side references " + v.token());
                pt.jets[v] = v.order == 0 ? uv : duv;
            } else {
                pt.jets[v] = lookup(i + s + v.level * m, v.order);
            }
        }
        try {
            return eval_numeric(dode.rhs, pt);
        } catch (const DomainError& err) {
            throw DomainError(std::string(err.what()) + " while evaluating the right-hand side at t=" +
                              std::to_string(t));
        }
    };

    // Acceleration at the initial junction is the F-based right limit.
    {
        const std::size_t slot0 = static_cast<std::size_t>(2 * m);
        traj.ddu[slot0] = rhs_at(0, 0.0, traj.u[slot0], traj.du[slot0]);
    }

    for (int i = 0; i < traj.steps; ++i) {
        const std::size_t slot = static_cast<std::size_t>(i + 2 * m);
        const double u0 = traj.u[slot];
        const double d0 = traj.du[slot];

        const double k1u = d0, k1d = traj.ddu[slot];
        const double k2u = d0 + 0.5 * h * k1d;
        const double k2d = rhs_at(i, 0.5, u0 + 0.5 * h * k1u, d0 + 0.5 * h * k1d);
        const double k3u = d0 + 0.5 * h * k2d;
        const double k3d = rhs_at(i, 0.5, u0 + 0.5 * h * k2u, d0 + 0.5 * h * k2d);
        const double k4u = d0 + h * k3d;
        const double k4d = rhs_at(i, 1.0, u0 + h * k3u, d0 + h * k3d);

        traj.u[slot + 1] = u0 + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        traj.du[slot + 1] = d0 + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        traj.ddu[slot + 1] = rhs_at(i + 1, 0.0, traj.u[slot + 1], traj.du[slot + 1]);
    }

    return traj;
}

void write_trajectory(const Trajectory& traj, std::ostream& os) {
    os << "# t u du ddu\n";
    char line[160];
    for (int i = traj.first_node(); i <= traj.last_node(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g %.17g %.17g %.17g\n", traj.time(i),
                      traj.value(i, 0), traj.value(i, 1), traj.value(i, 2));
        os << line;
    }
}

// ---------------------------------------------------------------------------
// Monitors
// ---------------------------------------------------------------------------

namespace {

MonitorWindow window_for(const Trajectory& traj, const Expr& e) {
    int min_level = 0, max_level = 0;
    for (const JetVar& v : jet_vars(e)) {
        min_level = std::min(min_level, int(v.level));
        max_level = std::max(max_level, int(v.level));
        if (!v.is_time() && v.order > 2)
            throw ValidationError("monitors cannot evaluate " + v.token());
    }
    MonitorWindow w;
    w.node_lo = -2 * traj.m - min_level * traj.m;
    w.node_hi = traj.steps - max_level * traj.m;
    if (w.node_lo > w.node_hi)
        throw Error("monitor window is empty for this trajectory");
    w.t_lo = traj.time(w.node_lo);
    w.t_hi = traj.time(w.node_hi);
    w.nodes = w.node_hi - w.node_lo + 1;
    return w;
}

double eval_on_grid(const Trajectory& traj, const Expr& e, int node,
                    const std::map<std::string, double>& consts) {
    EvalPoint pt;
    pt.consts = consts;
    pt.consts["tau"] = traj.tau;
    const double t = traj.time(node);
    for (const JetVar& v : jet_vars(e)) {
        if (v.is_time())
            pt.jets[v] = t + v.level * traj.tau;
        else
            pt.jets[v] = traj.value(node + v.level * traj.m, v.order);
    }
    return eval_numeric(e, pt);
}

}  // namespace

DriftReport monitor_differential(const Trajectory& traj, const Expr& integral,
                                 const std::map<std::string, double>& constants) {
    DriftReport r;
    r.window = window_for(traj, integral);
    r.reference = eval_on_grid(traj, integral, r.window.node_lo, constants);
    for (int node = r.window.node_lo; node <= r.window.node_hi; ++node) {
        const double v = eval_on_grid(traj, integral, node, constants);
        r.max_drift = std::max(r.max_drift, std::abs(v - r.reference));
    }
    return r;
}

PeriodicityReport monitor_difference(const Trajectory& traj, const Expr& difference,
                                     const std::map<std::string, double>& constants) {
    PeriodicityReport r;
    MonitorWindow w = window_for(traj, difference);
    if (w.node_lo > w.node_hi - traj.m)
        throw Error("monitor window is empty for this trajectory");
    r.window = w;
    r.window.node_hi = w.node_hi - traj.m;
    r.window.t_hi = traj.time(r.window.node_hi);
    r.window.nodes = r.window.node_hi - r.window.node_lo + 1;
    for (int node = r.window.node_lo; node <= r.window.node_hi; ++node) {
        const double here = eval_on_grid(traj, difference, node, constants);
        const double next = eval_on_grid(traj, difference, node + traj.m, constants);
        r.max_deviation = std::max(r.max_deviation, std::abs(next - here));
        r.max_abs = std::max(r.max_abs, std::abs(here));
    }
    return r;
}

ResidualReport verify_closed_relation(const Trajectory& traj, const Expr& relation,
                                      const std::map<std::string, double>& constants) {
    ResidualReport r;
    r.window = window_for(traj, relation);
    for (int node = r.window.node_lo; node <= r.window.node_hi; ++node)
        r.max_residual =
            std::max(r.max_residual, std::abs(eval_on_grid(traj, relation, node, constants)));
    return r;
}

}  // namespace dode
