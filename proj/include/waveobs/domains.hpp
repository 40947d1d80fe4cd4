#pragma once

// Characteristic boundary curves and maximum determinate domains. D_r is
// the domain determined by data on x=0 (bounded above by the curve traced
// backward from (t0+T, 0) and below by the one traced forward from
// (t0, 0)); D_l mirrors it from x=L. find_Ttilde scans time levels for
// segment coverage and picks the intermediate time in the middle of the
// covered set.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "waveobs/errors.hpp"
#include "waveobs/field.hpp"
#include "waveobs/problem.hpp"

namespace waveobs {

enum class CurveLabel { x1, x2, x3, x4 };
inline const char* curve_label_name(CurveLabel l) {
    switch (l) {
    case CurveLabel::x1: return "x1";
    case CurveLabel::x2: return "x2";
    case CurveLabel::x3: return "x3";
    case CurveLabel::x4: return "x4";
    }
    return "?";
}

// Sampled monotone characteristic boundary curve. Samples are stored with
// t ascending; evaluation clamps to the endpoint x-values, which encodes
// "the curve has exited through x=0 or x=L" on the vacuous side.
struct Curve {
    std::vector<double> t;
    std::vector<double> x;
    CurveLabel label = CurveLabel::x1;
    double start_t = 0.0, start_x = 0.0; // corner the trace started from

    double eval_clamped(double tq) const {
        if (t.empty())
            throw ValidationError("domains", "evaluating an empty curve");
        if (tq <= t.front()) return x.front();
        if (tq >= t.back()) return x.back();
        const auto it = std::upper_bound(t.begin(), t.end(), tq);
        const std::size_t i = std::size_t(it - t.begin()) - 1;
        const double w = (tq - t[i]) / (t[i + 1] - t[i]);
        return x[i] + w * (x[i + 1] - x[i]);
    }
};

// Traces one of the four characteristic boundary curves over a computed
// field with classical RK4 (step = grid dt, bilinear state interpolation),
// clipped where it exits x in [0, L].
//   x1: from (t0+T, 0) backward with dx/dt = -c
//   x2: from (t0,   0) forward  with dx/dt = +c
//   x3: from (t0+T, L) backward with dx/dt = +c
//   x4: from (t0,   L) forward  with dx/dt = -c
inline Curve trace_curve(const Problem& p, const Field& f, CurveLabel label) {
    const Grid& g = f.grid;
    const bool backward = label == CurveLabel::x1 || label == CurveLabel::x3;
    const bool from_left = label == CurveLabel::x1 || label == CurveLabel::x2;
    const double slope_sign =
        (label == CurveLabel::x2 || label == CurveLabel::x3) ? 1.0 : -1.0;

    Curve curve;
    curve.label = label;
    curve.start_t = backward ? g.t1 : g.t0;
    curve.start_x = from_left ? 0.0 : g.L;

    const double h = (backward ? -1.0 : 1.0) * g.dt();
    auto slope = [&](double t, double x) {
        const State s = f.interp_state(t, std::clamp(x, 0.0, g.L));
        return slope_sign * speed_at(p, t, x, s);
    };

    std::vector<double> ts{curve.start_t}, xs{curve.start_x};
    double t = curve.start_t, x = curve.start_x;
    for (int n = 0; n < g.nt; ++n) {
        const double k1 = slope(t, x);
        const double k2 = slope(t + 0.5 * h, x + 0.5 * h * k1);
        const double k3 = slope(t + 0.5 * h, x + 0.5 * h * k2);
        const double k4 = slope(t + h, x + h * k3);
        double x_new = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t_new = t + h;
        if (x_new < 0.0 || x_new > g.L) {
            // Clip at the exit: linear sub-step to the boundary.
            const double edge = x_new < 0.0 ? 0.0 : g.L;
            const double frac = (edge - x) / (x_new - x);
            ts.push_back(t + frac * h);
            xs.push_back(edge);
            break;
        }
        ts.push_back(t_new);
        xs.push_back(x_new);
        t = t_new;
        x = x_new;
    }
    if (backward) {
        std::reverse(ts.begin(), ts.end());
        std::reverse(xs.begin(), xs.end());
    }
    curve.t = std::move(ts);
    curve.x = std::move(xs);
    return curve;
}

// A maximum determinate domain bounded by two characteristic curves.
// For D_r (side == right of the data at x=0) a point (t, x) lies inside
// iff x <= min(x1(t), x2(t)); for D_l iff x >= max(x3(t), x4(t)).
struct DeterminateDomain {
    Side side = Side::right; // right = D_r, left = D_l
    Curve from_bottom;       // x2 (D_r) or x4 (D_l)
    Curve from_top;          // x1 (D_r) or x3 (D_l)
    double t0 = 0.0, t1 = 1.0;
    double L = 1.0;

    // For D_r: the domain at time t is [0, reach(t)].
    // For D_l: the domain at time t is [reach(t), L].
    double reach(double t) const {
        const double a = from_bottom.eval_clamped(t);
        const double b = from_top.eval_clamped(t);
        return side == Side::right ? std::min(a, b) : std::max(a, b);
    }
};

inline DeterminateDomain build_domain(const Curve& from_bottom,
                                      const Curve& from_top, Side side,
                                      double t0, double t1, double L) {
    if (!(t1 > t0))
        throw ValidationError("domains", "empty domain window",
                              ErrorCode::bad_grid);
    auto in_window = [&](const Curve& c) {
        return c.t.front() >= t0 - 1e-9 * (t1 - t0) &&
               c.t.back() <= t1 + 1e-9 * (t1 - t0);
    };
    if (!in_window(from_bottom) || !in_window(from_top))
        throw ValidationError("domains",
                              "curves traced on mismatched windows",
                              ErrorCode::bad_grid);
    return {side, from_bottom, from_top, t0, t1, L};
}

// Determinate domain realized by a sideways solve's mask: the per-column
// valid window edges are the numerically integrated boundary curves.
inline DeterminateDomain domain_from_sideways(const Field& f) {
    if (f.is_rectangular())
        throw ValidationError("domains",
                              "field carries no determinate-domain mask");
    const Grid& g = f.grid;
    // Identify the data side from which column holds the full window.
    const bool rightward =
        f.col_thi[0] - f.col_tlo[0] >= f.col_thi[std::size_t(g.nx)] -
                                           f.col_tlo[std::size_t(g.nx)];
    Curve lo, hi;
    lo.label = rightward ? CurveLabel::x2 : CurveLabel::x4;
    hi.label = rightward ? CurveLabel::x1 : CurveLabel::x3;
    lo.start_t = g.t0;
    hi.start_t = g.t1;
    lo.start_x = hi.start_x = rightward ? 0.0 : g.L;

    for (int k = 0; k <= g.nx; ++k) {
        const int j = rightward ? k : g.nx - k;
        if (f.col_thi[std::size_t(j)] < f.col_tlo[std::size_t(j)]) break;
        lo.t.push_back(f.col_tlo[std::size_t(j)]);
        lo.x.push_back(g.x(j));
        hi.t.push_back(f.col_thi[std::size_t(j)]);
        hi.x.push_back(g.x(j));
    }
    std::reverse(hi.t.begin(), hi.t.end());
    std::reverse(hi.x.begin(), hi.x.end());
    return build_domain(lo, hi, rightward ? Side::right : Side::left, g.t0,
                        g.t1, g.L);
}

enum class ObservationMode { two_sided, one_sided };

struct TtildeResult {
    double T_tilde = 0.0;
    double s_lo = 0.0, s_hi = 0.0;             // covered time interval
    double overlap_lo = 0.0, overlap_hi = 0.0; // x-overlap at T_tilde
};

// Scans grid time levels for coverage of the full segment {t} x [0, L]
// (cell-by-cell on an x-lattice, robust against envelope kinks) and
// returns the midpoint of the covered set. two_sided requires coverage by
// D_r U D_l with nonempty overlap; one_sided requires {t} x [0,L] inside
// D_r (or D_l for the mirrored variant).
inline TtildeResult find_Ttilde(const DeterminateDomain& dr,
                                const std::optional<DeterminateDomain>& dl,
                                ObservationMode mode, int nt_scan = 1024,
                                int nx_cells = 512) {
    const double t0 = dr.t0, t1 = dr.t1, L = dr.L;
    if (mode == ObservationMode::two_sided) {
        if (!dl)
            throw ValidationError("domains",
                                  "two-sided mode needs both domains");
        if (std::fabs(dl->t0 - t0) > 1e-9 * (t1 - t0) ||
            std::fabs(dl->t1 - t1) > 1e-9 * (t1 - t0))
            throw ValidationError("domains", "domains built on mismatched windows",
                                  ErrorCode::bad_grid);
    }

    auto covered = [&](double t) {
        // In one-sided mode 'dr' may itself be a left domain (mirror case).
        if (mode == ObservationMode::one_sided) {
            const double m = dr.reach(t);
            for (int k = 0; k < nx_cells; ++k) {
                const double xc = L * (double(k) + 0.5) / double(nx_cells);
                const bool in = dr.side == Side::right ? xc <= m : xc >= m;
                if (!in) return false;
            }
            return true;
        }
        const double m_r = dr.reach(t);
        const double m_l = dl->reach(t);
        for (int k = 0; k < nx_cells; ++k) {
            const double xc = L * (double(k) + 0.5) / double(nx_cells);
            if (!(xc <= m_r || xc >= m_l)) return false;
        }
        return true;
    };

    int best_lo = -1, best_hi = -2;
    int run_lo = -1;
    for (int i = 0; i <= nt_scan; ++i) {
        const double t = t0 + (t1 - t0) * double(i) / double(nt_scan);
        if (covered(t)) {
            if (run_lo < 0) run_lo = i;
            if (i - run_lo > best_hi - best_lo) {
                best_lo = run_lo;
                best_hi = i;
            }
        } else {
            run_lo = -1;
        }
    }
    if (best_lo < 0) {
        if (mode == ObservationMode::two_sided)
            throw PipelineError(
                "domains",
                "determinate domains do not intersect: the observability-time "
                "condition fails on this window",
                ErrorCode::no_intersection);
        throw PipelineError(
            "domains",
            "determinate domain does not traverse the strip: the "
            "observability-time condition fails on this window",
            ErrorCode::no_intersection);
    }

    TtildeResult r;
    r.s_lo = t0 + (t1 - t0) * double(best_lo) / double(nt_scan);
    r.s_hi = t0 + (t1 - t0) * double(best_hi) / double(nt_scan);
    r.T_tilde = 0.5 * (r.s_lo + r.s_hi);
    if (mode == ObservationMode::two_sided) {
        r.overlap_lo = dl->reach(r.T_tilde);
        r.overlap_hi = dr.reach(r.T_tilde);
    } else {
        r.overlap_lo = 0.0;
        r.overlap_hi = L;
    }
    return r;
}

} // namespace waveobs
