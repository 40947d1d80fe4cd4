#pragma once

// First-order reduction of the wave equation: state U = (u, v, w) with
// v = u_x, w = u_t, characteristic speeds (-c, 0, +c) and Riemann-type
// variables v1 = c*v + w, v2 = u, v3 = -c*v + w, so that v1 + v3 = 2w and
// v1 - v3 = 2cv. Boundary conditions are resolved numerically for the
// incoming variable; the closed-form rewritten boundary functions are not
// needed.

#include <cmath>
#include <string>

#include "waveobs/errors.hpp"
#include "waveobs/problem.hpp"

namespace waveobs {

struct State {
    double u = 0.0; // displacement
    double v = 0.0; // u_x
    double w = 0.0; // u_t
};

struct CharState {
    double v1 = 0.0;
    double v2 = 0.0;
    double v3 = 0.0;

    double w() const { return 0.5 * (v1 + v3); }
};

struct Eigenvalues {
    double lambda1, lambda2, lambda3;
};

inline double speed_at(const Problem& p, double t, double x, const State& s) {
    const double c = p.c(t, x, s.u, s.v, s.w);
    if (!(c > 0.0))
        throw PipelineError("charsys",
                            "hyperbolicity breach: c = " + std::to_string(c) +
                                " <= 0 at (t=" + std::to_string(t) +
                                ", x=" + std::to_string(x) + ")",
                            ErrorCode::hyperbolicity_breach);
    return c;
}

inline Eigenvalues eigenvalues(const Problem& p, double t, double x,
                               const State& s) {
    const double c = speed_at(p, t, x, s);
    return {-c, 0.0, c};
}

inline CharState to_characteristic(const Problem& p, double t, double x,
                                   const State& s) {
    const double c = speed_at(p, t, x, s);
    return {c * s.v + s.w, s.u, -c * s.v + s.w};
}

// Inverts the transform: u = v2, w = (v1+v3)/2, and v solves
// v = (v1-v3) / (2 c(t,x,u,v,w)) by damped fixed-point iteration. The
// iteration contracts in the small-data regime the theory works in;
// non-convergence is reported as leaving that regime.
inline State from_characteristic(const Problem& p, double t, double x,
                                 const CharState& cs) {
    State s;
    s.u = cs.v2;
    s.w = 0.5 * (cs.v1 + cs.v3);
    const double half_diff = 0.5 * (cs.v1 - cs.v3);

    double v = 0.0;
    double prev_res = std::numeric_limits<double>::infinity();
    double damping = 1.0;
    for (int it = 0; it < 50; ++it) {
        const double c = p.c(t, x, s.u, v, s.w);
        if (!(c > 0.0))
            throw PipelineError("charsys",
                                "hyperbolicity breach during inversion: c = " +
                                    std::to_string(c),
                                ErrorCode::hyperbolicity_breach);
        const double target = half_diff / c;
        const double res = std::fabs(target - v);
        if (res <= 1e-15 * std::max(1.0, std::fabs(v))) {
            s.v = target;
            return s;
        }
        if (res > prev_res) damping *= 0.5;
        prev_res = res;
        v += damping * (target - v);
    }
    throw PipelineError("charsys",
                        "characteristic inversion did not converge in 50 "
                        "iterations (state outside the small-data regime)",
                        ErrorCode::nonconvergence);
}

// Which characteristic variable is known (transported from the interior)
// when resolving a boundary node. Forward-in-t marching has v1 outgoing at
// x=0 and v3 outgoing at x=L; time-reversed marching swaps the roles.
enum class OutgoingVar { v1, v3 };

struct BoundaryKnowns {
    double outgoing = 0.0;
    OutgoingVar which = OutgoingVar::v1;
    double u = 0.0; // current displacement at the boundary node
};

namespace detail {

// Boundary value of v = u_x implied by the physical relation, given u and w.
inline double bc_v_of(const BoundaryCondition& bc, double u, double w,
                      double h_val) {
    const double sgn = bc.relation_sign();
    switch (bc.kind) {
    case BcKind::neumann: return h_val;
    case BcKind::robin: return h_val - sgn * bc.alpha * u;
    case BcKind::dissipative: return h_val - sgn * bc.beta * w;
    case BcKind::dirichlet: break;
    }
    throw PipelineError("charsys", "bc_v_of called for a Dirichlet condition");
}

} // namespace detail

// Resolves the incoming characteristic variable at a boundary node from the
// outgoing one and the physical boundary condition. Dirichlet pins
// v2 = h(t) and w = h'(t), hence incoming = 2 h'(t) - outgoing. The other
// families are solved by a scalar Newton iteration in w; for a dissipative
// condition the solve toward v3 at x=L (or toward v1 at x=0) is the
// excluded degenerate direction when beta approaches 1/c.
inline CharState boundary_resolve(const Problem& p,
                                  const BoundaryCondition& bc, double t,
                                  const BoundaryKnowns& known, double h_val,
                                  double h_deriv) {
    const double x = bc.side == Side::left ? 0.0 : p.L;

    if (bc.kind == BcKind::dirichlet) {
        const double incoming = 2.0 * h_deriv - known.outgoing;
        CharState cs;
        cs.v2 = h_val;
        cs.v1 = known.which == OutgoingVar::v1 ? known.outgoing : incoming;
        cs.v3 = known.which == OutgoingVar::v3 ? known.outgoing : incoming;
        return cs;
    }

    // Degenerate direction check (zero-state speed).
    const bool solving_hard_direction =
        (bc.side == Side::right && known.which == OutgoingVar::v1) ||
        (bc.side == Side::left && known.which == OutgoingVar::v3);
    if (bc.kind == BcKind::dissipative && solving_hard_direction) {
        const double c0 = p.c0(t, x);
        if (std::fabs(bc.beta - 1.0 / c0) < 1e-8)
            throw PipelineError(
                "charsys",
                std::string("degenerate dissipative boundary at ") +
                    side_name(bc.side) + ": beta = " + std::to_string(bc.beta) +
                    " coincides with 1/c(t," + (bc.side == Side::left ? "0" : "L") +
                    ",0,0,0) = " + std::to_string(1.0 / c0),
                ErrorCode::boundary_degeneracy);
    }

    // Solve for w: sig_c * c(t,x,u,v,w) * v + w = outgoing, with
    // v = v(u, w, h) from the physical relation; sig_c is +1 when the
    // outgoing variable is v1 and -1 when it is v3.
    const double sig = known.which == OutgoingVar::v1 ? 1.0 : -1.0;
    auto residual = [&](double w) {
        const double v = detail::bc_v_of(bc, known.u, w, h_val);
        const double c = p.c(t, x, known.u, v, w);
        if (!(c > 0.0))
            throw PipelineError("charsys",
                                "hyperbolicity breach in boundary resolve",
                                ErrorCode::hyperbolicity_breach);
        return sig * c * v + w - known.outgoing;
    };

    double w = known.outgoing; // exact for h = 0 at zero state
    const double tol = 1e-12 * std::max(1.0, std::fabs(known.outgoing));
    for (int it = 0; it < 50; ++it) {
        const double g = residual(w);
        if (std::fabs(g) <= tol) {
            const double v = detail::bc_v_of(bc, known.u, w, h_val);
            CharState cs;
            cs.v2 = known.u;
            cs.v1 = known.which == OutgoingVar::v1 ? known.outgoing : 2.0 * w - known.outgoing;
            cs.v3 = known.which == OutgoingVar::v3 ? known.outgoing : 2.0 * w - known.outgoing;
            (void)v;
            return cs;
        }
        const double step = 1e-7 * std::max(1.0, std::fabs(w));
        const double dg = (residual(w + step) - residual(w - step)) / (2.0 * step);
        if (!(std::fabs(dg) > 1e-10))
            throw PipelineError("charsys",
                                "boundary resolve Newton derivative vanished "
                                "(near-degenerate boundary condition)",
                                ErrorCode::boundary_degeneracy);
        w -= g / dg;
        if (!std::isfinite(w))
            throw PipelineError("charsys", "boundary resolve Newton diverged",
                                ErrorCode::nonconvergence);
    }
    throw PipelineError("charsys",
                        "boundary resolve Newton did not converge in 50 "
                        "iterations",
                        ErrorCode::nonconvergence);
}

// Physical boundary relation residual for a resolved state (diagnostics).
inline double boundary_relation_residual(const BoundaryCondition& bc,
                                         const State& s, double h_val) {
    const double sgn = bc.relation_sign();
    switch (bc.kind) {
    case BcKind::dirichlet: return s.u - h_val;
    case BcKind::neumann: return s.v - h_val;
    case BcKind::robin: return s.v + sgn * bc.alpha * s.u - h_val;
    case BcKind::dissipative: return s.v + sgn * bc.beta * s.w - h_val;
    }
    return 0.0;
}

} // namespace waveobs
