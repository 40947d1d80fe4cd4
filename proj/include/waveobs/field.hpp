#pragma once

// Gridded solutions. A Field stores the full state (u, u_x, u_t) on a
// rectangle [t0,t1] x [0,L]; sideways solves additionally carry a
// per-column valid time window [col_tlo, col_thi] realizing the
// determinate domain, with the boolean mask derived from it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "waveobs/charsys.hpp"
#include "waveobs/errors.hpp"

namespace waveobs {

struct Grid {
    double t0 = 0.0;
    double t1 = 1.0;
    int nx = 8;
    int nt = 8;
    double L = 1.0;

    double dx() const { return L / double(nx); }
    double dt() const { return (t1 - t0) / double(nt); }
    double x(int j) const { return L * double(j) / double(nx); }
    double time(int n) const {
        return t0 + (t1 - t0) * double(n) / double(nt);
    }

    void validate() const {
        if (nx < 8 || nt < 8)
            throw ValidationError("field", "grid must have nx >= 8 and nt >= 8",
                                  ErrorCode::bad_grid);
        if (!(t1 > t0) || !(L > 0.0))
            throw ValidationError("field", "grid window and L must be positive",
                                  ErrorCode::bad_grid);
    }
};

struct Field {
    Grid grid;
    std::vector<State> values;        // (nt+1) * (nx+1), time-major
    std::vector<std::uint8_t> mask;   // same layout; 1 = determined
    std::vector<double> col_tlo;      // per-column window (sideways only)
    std::vector<double> col_thi;
    std::vector<std::string> warnings;

    static Field rectangular(const Grid& g) {
        Field f;
        f.grid = g;
        f.values.assign(std::size_t(g.nt + 1) * std::size_t(g.nx + 1), State{});
        f.mask.assign(f.values.size(), 1);
        return f;
    }

    bool is_rectangular() const { return col_tlo.empty(); }

    std::size_t idx(int n, int j) const {
        return std::size_t(n) * std::size_t(grid.nx + 1) + std::size_t(j);
    }
    State& at(int n, int j) { return values[idx(n, j)]; }
    const State& at(int n, int j) const { return values[idx(n, j)]; }
    bool valid(int n, int j) const { return mask[idx(n, j)] != 0; }

    // Valid node-index range of a column; empty range if none.
    std::pair<int, int> column_range(int j) const {
        if (is_rectangular()) return {0, grid.nt};
        const double dt = grid.dt();
        const double tol = 1e-9 * dt;
        if (col_thi[std::size_t(j)] < col_tlo[std::size_t(j)] - tol) return {1, 0};
        int lo = int(std::ceil((col_tlo[std::size_t(j)] - grid.t0) / dt - 1e-9));
        int hi = int(std::floor((col_thi[std::size_t(j)] - grid.t0) / dt + 1e-9));
        lo = std::max(lo, 0);
        hi = std::min(hi, grid.nt);
        return {lo, hi};
    }

    // Discrete C1 norm of u over the valid cells: max of |u|, |u_x|, |u_t|.
    double c1_norm() const {
        double m = 0.0;
        for (int n = 0; n <= grid.nt; ++n)
            for (int j = 0; j <= grid.nx; ++j)
                if (valid(n, j)) {
                    const State& s = at(n, j);
                    m = std::max({m, std::fabs(s.u), std::fabs(s.v),
                                  std::fabs(s.w)});
                }
        return m;
    }

    // Bilinear state interpolation; on masked fields the time coordinate is
    // clamped into each column's valid node range (no extrapolation outside
    // the determinate domain).
    State interp_state(double t, double x) const {
        const double dx = grid.dx(), dt = grid.dt();
        double xr = std::clamp(x, 0.0, grid.L);
        int j = std::min(int(xr / dx), grid.nx - 1);
        const double wx = xr / dx - double(j);

        auto column_value = [&](int jj) {
            auto [lo, hi] = column_range(jj);
            if (lo > hi)
                throw PipelineError("field",
                                    "state interpolation outside the field "
                                    "mask at x=" + std::to_string(grid.x(jj)),
                                    ErrorCode::out_of_window);
            double pos = (t - grid.t0) / dt;
            pos = std::clamp(pos, double(lo), double(hi));
            int n = std::min(int(pos), hi - 1);
            n = std::max(n, lo);
            if (lo == hi) return at(lo, jj);
            const double wt = pos - double(n);
            const State& a = at(n, jj);
            const State& b = at(n + 1, jj);
            return State{a.u * (1 - wt) + b.u * wt, a.v * (1 - wt) + b.v * wt,
                         a.w * (1 - wt) + b.w * wt};
        };
        const State sa = column_value(j);
        const State sb = column_value(j + 1);
        return {sa.u * (1 - wx) + sb.u * wx, sa.v * (1 - wx) + sb.v * wx,
                sa.w * (1 - wx) + sb.w * wx};
    }
};

// Boundary Cauchy data for a sideways solve: u and u_x traces on one side,
// sampled on a uniform time grid over the observation window.
struct SidewaysData {
    Side side = Side::left;
    std::vector<double> a; // u on the boundary
    std::vector<double> b; // u_x on the boundary
    double t0 = 0.0;
    double t1 = 1.0;

    double dt() const { return (t1 - t0) / double(a.size() - 1); }
};

struct TimeSlice {
    std::vector<double> x; // node coordinates over the valid range
    std::vector<double> u; // Phi
    std::vector<double> w; // Psi
    int j_lo = 0, j_hi = -1;

    bool empty() const { return j_hi < j_lo; }
    double x_lo() const { return x.front(); }
    double x_hi() const { return x.back(); }
};

// Values of (u, u_t) on the line t = t_query, linearly interpolated
// between the two adjacent time levels; on masked fields only the columns
// whose valid window covers t_query are returned.
inline TimeSlice extract_time_slice(const Field& f, double t_query) {
    const Grid& g = f.grid;
    const double dt = g.dt();
    if (t_query < g.t0 - 1e-9 * dt || t_query > g.t1 + 1e-9 * dt)
        throw ValidationError("field",
                              "slice time " + std::to_string(t_query) +
                                  " outside the field window [" +
                                  std::to_string(g.t0) + ", " +
                                  std::to_string(g.t1) + "]",
                              ErrorCode::out_of_window);

    TimeSlice slice;
    double pos = std::clamp((t_query - g.t0) / dt, 0.0, double(g.nt));
    int n = std::min(int(pos), g.nt - 1);
    const double wt = pos - double(n);

    int first = -1, last = -2;
    std::vector<double> xs, us, ws;
    for (int j = 0; j <= g.nx; ++j) {
        auto [lo, hi] = f.column_range(j);
        // Use both bracketing levels when valid, else fall back to the one
        // inside the window (first-order at the mask edge).
        int na = n, nb = n + 1;
        double wq = wt;
        const bool a_ok = na >= lo && na <= hi;
        const bool b_ok = nb >= lo && nb <= hi;
        if (!a_ok && !b_ok) {
            if (first >= 0) break; // contiguous range ended
            continue;
        }
        if (!a_ok) { na = nb; wq = 0.0; }
        if (!b_ok) { nb = na; wq = 0.0; }
        const State& sa = f.at(na, j);
        const State& sb = f.at(nb, j);
        if (first < 0) first = j;
        last = j;
        xs.push_back(g.x(j));
        us.push_back(sa.u * (1 - wq) + sb.u * wq);
        ws.push_back(sa.w * (1 - wq) + sb.w * wq);
    }
    if (first < 0)
        throw PipelineError("field",
                            "slice at t=" + std::to_string(t_query) +
                                " lies outside the determinate domain",
                            ErrorCode::out_of_window);
    slice.x = std::move(xs);
    slice.u = std::move(us);
    slice.w = std::move(ws);
    slice.j_lo = first;
    slice.j_hi = last;
    return slice;
}

} // namespace waveobs
