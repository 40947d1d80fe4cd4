#pragma once

// Characteristics-based (CIR) explicit solver for the first-order system
//   u_t = w,  v_t = w_x,  w_t = c^2 v_x + f
// in four evolution directions: forward/backward in t (mixed problems) and
// rightward/leftward in x (sideways Cauchy problems from boundary data,
// valid because c > 0 makes the system hyperbolic in x as well).
//
// The update at a node freezes the local speed c*, transforms the previous
// level to the characteristic variables of that frozen speed, traces each
// characteristic back one step, interpolates linearly, and integrates the
// source along the way; the vertical characteristic (u_t = w, resp.
// u_x = v) is integrated by the trapezoidal rule. Freezing the same c* for
// the transform and its inverse keeps the scheme consistent when c drifts
// with t, x or the state.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "waveobs/charsys.hpp"
#include "waveobs/errors.hpp"
#include "waveobs/field.hpp"
#include "waveobs/problem.hpp"

namespace waveobs {

enum class TimeDirection { forward, backward };

struct InitialData {
    std::vector<double> u;
    std::vector<double> w;
    std::vector<double> v; // optional; derived from u by central differences
};

namespace detail {

inline State lerp_state(const State& a, const State& b, double w) {
    return {a.u + (b.u - a.u) * w, a.v + (b.v - a.v) * w,
            a.w + (b.w - a.w) * w};
}

inline State interp_row(const State* row, int nx, double dx, double x) {
    double pos = x / dx;
    pos = std::clamp(pos, 0.0, double(nx));
    int j = std::min(int(pos), nx - 1);
    return lerp_state(row[j], row[j + 1], pos - double(j));
}

} // namespace detail

// Suggested time-step count for a CFL-safe mixed solve (safety factor
// applied to the worst zero-state speed over the window).
inline int suggest_nt(const Problem& p, double t_lo, double t_hi, int nx,
                      double safety = 0.8) {
    const auto [cmin, cmax] = c_zero_min_max(p, t_lo, t_hi);
    (void)cmin;
    const double dx = p.L / double(nx);
    const int nt = int(std::ceil((t_hi - t_lo) * cmax / (safety * dx)));
    return std::max(nt, 8);
}

// Mixed initial-boundary value solve on the full rectangle. The initial
// data is sampled at the starting time level: t0 for a forward solve, t1
// for a backward one (the backward direction runs the same scheme under
// time reversal, which swaps the outgoing characteristic at each boundary).
inline Field solve_mixed(const Problem& p, const Grid& g, TimeDirection dir,
                         const InitialData& init,
                         const BoundaryCondition& bc_left,
                         const BoundaryCondition& bc_right) {
    g.validate();
    const int nx = g.nx, nt = g.nt;
    const double dx = g.dx(), dt = g.dt();
    if (int(init.u.size()) != nx + 1 || int(init.w.size()) != nx + 1)
        throw ValidationError("hypersolve",
                              "initial data must be sampled on the grid's "
                              "space nodes",
                              ErrorCode::bad_grid);

    // CFL sweep at zero state over the window.
    const auto [cmin0, cmax0] = c_zero_min_max(p, g.t0, g.t1);
    (void)cmin0;
    if (cmax0 * dt > dx * (1.0 + 1e-12))
        throw ValidationError(
            "hypersolve",
            "grid violates the CFL condition: c_max*dt = " +
                std::to_string(cmax0 * dt) + " > dx = " + std::to_string(dx) +
                "; increase nt to at least " +
                std::to_string(suggest_nt(p, g.t0, g.t1, nx)),
            ErrorCode::cfl_violation);

    Field f = Field::rectangular(g);
    if (cmax0 * dt > 0.8 * dx)
        f.warnings.push_back("hypersolve: CFL ratio " +
                             std::to_string(cmax0 * dt / dx) +
                             " exceeds the 0.8 safety margin at zero state");

    // Starting level.
    std::vector<double> v0 = init.v;
    if (v0.empty()) v0 = sampled_derivative(init.u, dx);
    const int n_start = dir == TimeDirection::forward ? 0 : nt;
    for (int j = 0; j <= nx; ++j)
        f.at(n_start, j) = {init.u[std::size_t(j)], v0[std::size_t(j)],
                            init.w[std::size_t(j)]};

    const double sgn = dir == TimeDirection::forward ? 1.0 : -1.0;
    const double sdt = sgn * dt;

    for (int k = 0; k < nt; ++k) {
        const int n_cur = dir == TimeDirection::forward ? k : nt - k;
        const int n_nxt = dir == TimeDirection::forward ? k + 1 : nt - k - 1;
        const double t_cur = g.time(n_cur);
        const double t_nxt = g.time(n_nxt);
        const State* cur = &f.values[f.idx(n_cur, 0)];
        State* nxt = &f.values[f.idx(n_nxt, 0)];

        // Interior nodes.
        for (int j = 1; j < nx; ++j) {
            const double x = g.x(j);
            const State& s = cur[j];
            const double cstar = speed_at(p, t_cur, x, s);
            if (cstar * dt > dx * (1.0 + 1e-9))
                throw PipelineError(
                    "hypersolve",
                    "CFL violation mid-solve: c = " + std::to_string(cstar) +
                        " at (t=" + std::to_string(t_cur) +
                        ", x=" + std::to_string(x) + ") exceeds dx/dt",
                    ErrorCode::cfl_violation);

            const double foot1 = x + cstar * sdt; // dx/dt = -c* family
            const double foot3 = x - cstar * sdt; // dx/dt = +c* family
            const State s1 = detail::interp_row(cur, nx, dx, foot1);
            const State s3 = detail::interp_row(cur, nx, dx, foot3);
            double om1 = cstar * s1.v + s1.w +
                         sdt * p.f(t_cur, foot1, s1.u, s1.v, s1.w);
            double om3 = -cstar * s3.v + s3.w +
                         sdt * p.f(t_cur, foot3, s3.u, s3.v, s3.w);

            const double w_new = 0.5 * (om1 + om3);
            const double v_new = 0.5 * (om1 - om3) / cstar;
            const double u_new = s.u + 0.5 * sdt * (s.w + w_new);
            nxt[j] = {u_new, v_new, w_new};
        }

        // Boundary nodes: transport the outgoing characteristic variable,
        // then resolve the incoming one from the physical condition.
        for (int side = 0; side < 2; ++side) {
            const bool left = side == 0;
            const int j = left ? 0 : nx;
            const double x = left ? 0.0 : g.L;
            const BoundaryCondition& bc = left ? bc_left : bc_right;
            const State& s = cur[j];
            const double cstar = speed_at(p, t_cur, x, s);
            if (cstar * dt > dx * (1.0 + 1e-9))
                throw PipelineError("hypersolve",
                                    "CFL violation mid-solve at the boundary",
                                    ErrorCode::cfl_violation);

            // Forward: v1 leaves through x=0 and v3 through x=L; the
            // time-reversed march swaps them.
            const bool out_is_v1 =
                (left && dir == TimeDirection::forward) ||
                (!left && dir == TimeDirection::backward);
            const double foot =
                out_is_v1 ? x + cstar * sdt : x - cstar * sdt;
            const State sf = detail::interp_row(cur, nx, dx, foot);
            const double fsrc = p.f(t_cur, foot, sf.u, sf.v, sf.w);
            const double om_out =
                (out_is_v1 ? cstar * sf.v + sf.w : -cstar * sf.v + sf.w) +
                sdt * fsrc;

            const double h_val = bc.h.value(t_nxt);
            const double h_der = bc.h.deriv(t_nxt);
            BoundaryKnowns known;
            known.outgoing = om_out;
            known.which = out_is_v1 ? OutgoingVar::v1 : OutgoingVar::v3;
            known.u = s.u + sdt * s.w; // predictor

            CharState cs = boundary_resolve(p, bc, t_nxt, known, h_val, h_der);
            if (bc.kind != BcKind::dirichlet) {
                known.u = s.u + 0.5 * sdt * (s.w + cs.w()); // corrector
                cs = boundary_resolve(p, bc, t_nxt, known, h_val, h_der);
                cs.v2 = known.u;
            }
            nxt[j] = from_characteristic(p, t_nxt, x, cs);
        }
    }

    const double c1 = f.c1_norm();
    if (c1 > p.guard_epsilon)
        f.warnings.push_back(
            "hypersolve: smallness guard breached: discrete C1 norm " +
            std::to_string(c1) + " > epsilon " +
            std::to_string(p.guard_epsilon));
    return f;
}

// Forward simulation of the problem's own mixed problem: samples the
// initial data, attaches the compatibility report as warnings, solves.
inline Field simulate_forward(const Problem& p, const Grid& g) {
    InitialData init;
    init.u.resize(std::size_t(g.nx) + 1);
    init.w.resize(std::size_t(g.nx) + 1);
    init.v.resize(std::size_t(g.nx) + 1);
    for (int j = 0; j <= g.nx; ++j) {
        const double x = g.x(j);
        init.u[std::size_t(j)] = p.phi(x);
        init.w[std::size_t(j)] = p.psi(x);
        init.v[std::size_t(j)] = deriv1(p.phi, x);
    }
    std::vector<std::string> pre_warnings;
    const CompatReport rep = check_compatibility(p, 2);
    if (!rep.all_pass())
        pre_warnings.push_back(
            "problem: corner compatibility residuals exceed tolerance "
            "(classical regularity of the solution is not guaranteed)");
    Field f = solve_mixed(p, g, TimeDirection::forward, init, p.bc_left,
                          p.bc_right);
    f.warnings.insert(f.warnings.begin(), pre_warnings.begin(),
                      pre_warnings.end());
    return f;
}

// ---------------------------------------------------------------------------
// Sideways Cauchy solve.

struct SidewaysOptions {
    double cfl_ratio = 0.95;          // dx as a fraction of dt * min c
    bool require_full_traversal = false;
};

// Grid whose t-sampling reuses the observation record and whose column
// spacing satisfies the sideways CFL dx <= ratio * dt * min c.
inline Grid sideways_grid(const Problem& p, const SidewaysData& data,
                          double cfl_ratio = 0.95) {
    Grid g;
    g.t0 = data.t0;
    g.t1 = data.t1;
    g.nt = int(data.a.size()) - 1;
    g.L = p.L;
    const auto [cmin, cmax] = c_zero_min_max(p, data.t0, data.t1);
    (void)cmax;
    if (!(cmin > 0.0))
        throw ValidationError("hypersolve", "sideways solve requires c > 0",
                              ErrorCode::hyperbolicity_breach);
    const double dt = data.dt();
    g.nx = std::max(8, int(std::ceil(p.L / (cfl_ratio * dt * cmin))));
    return g;
}

// Space-marching solve from boundary trace data (u, u_x) = (a, b) on one
// side. Along x the characteristic slopes are dt/dx = +-1/c and 0:
// u_x = v exactly (trapezoid), while the pair v -+ w/c is transported
// along dt/dx = +-1/c with source -f/c^2 (from v_x = (w_t - f)/c^2).
// The valid time window of each column shrinks by dx/c at both ends,
// which realizes the maximum determinate domain of the data; the mask
// records it.
inline Field solve_cauchy_sideways(const Problem& p, const SidewaysData& data,
                                   const Grid& g,
                                   const SidewaysOptions& opt = {}) {
    g.validate();
    const int nx = g.nx, nt = g.nt;
    const double dx = g.dx(), dt = g.dt();
    if (int(data.a.size()) != nt + 1 || int(data.b.size()) != nt + 1)
        throw ValidationError("hypersolve",
                              "sideways data must be sampled on the grid's "
                              "time levels",
                              ErrorCode::bad_grid);
    if (std::fabs(data.t0 - g.t0) > 1e-12 || std::fabs(data.t1 - g.t1) > 1e-12)
        throw ValidationError("hypersolve",
                              "sideways grid window must match the data window",
                              ErrorCode::bad_grid);
    const auto [cmin0, cmax0] = c_zero_min_max(p, g.t0, g.t1);
    (void)cmax0;
    if (dx > dt * cmin0 * (1.0 + 1e-12))
        throw ValidationError(
            "hypersolve",
            "sideways CFL violated: dx = " + std::to_string(dx) +
                " > dt * min c = " + std::to_string(dt * cmin0),
            ErrorCode::cfl_violation);

    Field f;
    f.grid = g;
    f.values.assign(std::size_t(nt + 1) * std::size_t(nx + 1), State{});
    f.mask.assign(f.values.size(), 0);
    f.col_tlo.assign(std::size_t(nx + 1), g.t1 + dt); // empty by default
    f.col_thi.assign(std::size_t(nx + 1), g.t0 - dt);

    const bool rightward = data.side == Side::left;
    const int j_first = rightward ? 0 : nx;
    const int j_last = rightward ? nx : 0;
    const int jstep = rightward ? 1 : -1;
    const double sdx = rightward ? dx : -dx;

    // Data column.
    const std::vector<double> aderiv = sampled_derivative(data.a, dt);
    for (int n = 0; n <= nt; ++n) {
        f.at(n, j_first) = {data.a[std::size_t(n)], data.b[std::size_t(n)],
                            aderiv[std::size_t(n)]};
        f.mask[f.idx(n, j_first)] = 1;
    }
    f.col_tlo[std::size_t(j_first)] = g.t0;
    f.col_thi[std::size_t(j_first)] = g.t1;

    double tlo = g.t0, thi = g.t1;
    int j = j_first;
    while (j != j_last) {
        const int jn = j + jstep;
        const double x_cur = g.x(j);
        const auto cur_range = f.column_range(j);
        const int nlo = cur_range.first, nhi = cur_range.second;
        if (nlo >= nhi) break; // fewer than two valid nodes left

        const State* cur = &f.values[f.idx(0, j)];
        auto col_state = [&](double t) {
            double pos = (t - g.t0) / dt;
            pos = std::clamp(pos, double(nlo), double(nhi));
            const int n = std::max(nlo, std::min(int(pos), nhi - 1));
            const std::size_t stride = std::size_t(nx + 1);
            return detail::lerp_state(cur[std::size_t(n) * stride],
                                      cur[std::size_t(n + 1) * stride],
                                      pos - double(n));
        };

        // Advance the determinate-domain edges by one column (midpoint rule
        // on dt/dx = +-1/c along the computed edge states).
        auto edge_advance = [&](double tau, double direction) {
            const State se = col_state(tau);
            const double c1 = speed_at(p, tau, x_cur, se);
            const double tau_mid = tau + direction * 0.5 * dx / c1;
            const State sm = col_state(tau_mid);
            const double c2 = speed_at(p, std::clamp(tau_mid, tlo, thi),
                                       x_cur + 0.5 * sdx, sm);
            return tau + direction * dx / c2;
        };
        const double tlo_next = edge_advance(tlo, +1.0);
        const double thi_next = edge_advance(thi, -1.0);
        if (thi_next - tlo_next <= 0.0) {
            tlo = tlo_next;
            thi = thi_next;
            break; // cone closed: the domain ends before the next column
        }

        f.col_tlo[std::size_t(jn)] = tlo_next;
        f.col_thi[std::size_t(jn)] = thi_next;
        tlo = tlo_next;
        thi = thi_next;

        auto [mlo, mhi] = f.column_range(jn);
        const double t_lo_cur = g.time(nlo), t_hi_cur = g.time(nhi);
        for (int n = mlo; n <= mhi; ++n) {
            const double t = g.time(n);
            const State s_here = f.at(n, j);
            const double cstar = speed_at(p, t, x_cur, s_here);
            if (dx / cstar > dt * (1.0 + 1e-9))
                throw PipelineError(
                    "hypersolve",
                    "sideways CFL violation mid-solve: c = " +
                        std::to_string(cstar) + " at (t=" + std::to_string(t) +
                        ", x=" + std::to_string(x_cur) + ")",
                    ErrorCode::cfl_violation);

            // omega+ = v - w/c* along dt/dx = +1/c*;
            // omega- = v + w/c* along dt/dx = -1/c*.
            const double tf_plus = std::clamp(t - sdx / cstar, t_lo_cur, t_hi_cur);
            const double tf_minus = std::clamp(t + sdx / cstar, t_lo_cur, t_hi_cur);
            const State sp = col_state(tf_plus);
            const State sm = col_state(tf_minus);
            const double c2 = cstar * cstar;
            const double om_p = sp.v - sp.w / cstar -
                                sdx * p.f(tf_plus, x_cur, sp.u, sp.v, sp.w) / c2;
            const double om_m = sm.v + sm.w / cstar -
                                sdx * p.f(tf_minus, x_cur, sm.u, sm.v, sm.w) / c2;

            const double v_new = 0.5 * (om_p + om_m);
            const double w_new = 0.5 * cstar * (om_m - om_p);
            const double u_new = s_here.u + 0.5 * sdx * (s_here.v + v_new);
            f.at(n, jn) = {u_new, v_new, w_new};
            f.mask[f.idx(n, jn)] = 1;
        }
        j = jn;
    }

    if (opt.require_full_traversal && j != j_last)
        throw PipelineError(
            "hypersolve",
            "determinate domain emptied at x = " + std::to_string(g.x(j)) +
                " before reaching the far side (observation window too short)",
            ErrorCode::mask_empty);

    const double c1 = f.c1_norm();
    if (c1 > p.guard_epsilon)
        f.warnings.push_back(
            "hypersolve: smallness guard breached: discrete C1 norm " +
            std::to_string(c1) + " > epsilon " +
            std::to_string(p.guard_epsilon));
    return f;
}

} // namespace waveobs
