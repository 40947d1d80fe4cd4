#pragma once

// Constructive reconstruction of the initial data from boundary
// observations. Two-sided: sideways Cauchy solves from both boundary
// traces, an intermediate state (Phi, Psi) glued on the overlap of the two
// determinate domains at an intermediate time T~, then a backward mixed
// solve down to t0 with Dirichlet data u = a(t), u = abar(t). One-sided:
// a single sideways solve that must traverse the whole strip, and the
// backward solve keeps the original physical condition on the unobserved
// side. The mirrored one-sided variant reduces to the left variant by the
// exact reflection x -> L - x.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "waveobs/domains.hpp"
#include "waveobs/errors.hpp"
#include "waveobs/field.hpp"
#include "waveobs/hypersolve.hpp"
#include "waveobs/observe.hpp"
#include "waveobs/obstime.hpp"
#include "waveobs/problem.hpp"

namespace waveobs {

enum class ReconstructionMode { two_sided, one_sided_left, one_sided_right };
inline const char* reconstruction_mode_name(ReconstructionMode m) {
    switch (m) {
    case ReconstructionMode::two_sided: return "two_sided";
    case ReconstructionMode::one_sided_left: return "one_sided_left";
    case ReconstructionMode::one_sided_right: return "one_sided_right";
    }
    return "?";
}

struct ReconstructionResult {
    std::vector<double> x;       // output nodes on [0, L]
    std::vector<double> phi_hat; // recovered u(t0, .)
    std::vector<double> psi_hat; // recovered u_t(t0, .)
    double T_tilde = 0.0;
    double overlap_mismatch = 0.0; // two-sided: slice disagreement on the overlap
    SmallnessGuard guard;
    double ratio = 0.0; // observability ratio of the recovered data
    double compat_residual_left = 0.0;  // |Phi(0) - a(T~)|
    double compat_residual_right = 0.0; // |Phi(L) - abar(T~)| (two-sided)
    TtildeResult domain_info;
    std::vector<std::string> warnings;
};

struct ReconstructOptions {
    int nx_out = 200;           // backward/output grid columns
    double sideways_cfl = 0.95; // fraction of dt * min c
    double backward_cfl_safety = 0.8;
};

namespace detail {

inline void check_window(const Observation& obs, double t0, double T,
                         const char* which) {
    const double tol = 1e-9 * std::max(1.0, T);
    if (std::fabs(obs.t0 - t0) > tol || std::fabs(obs.t1 - (t0 + T)) > tol)
        throw ValidationError("reconstruct",
                              std::string(which) +
                                  " observation window does not match "
                                  "[t0, t0+T]");
}

// Restrict boundary samples to [t0, t_cut] (one node of slack kept for
// interpolation), per the backward solve living on R(t0, T~).
inline std::vector<double> restrict_samples(const std::vector<double>& s,
                                            double t0, double dt, double t_cut) {
    const std::size_t want =
        std::max<std::size_t>(3, std::size_t(std::ceil((t_cut - t0) / dt)) + 2);
    const std::size_t keep = std::min(s.size(), want);
    return {s.begin(), s.begin() + std::ptrdiff_t(keep)};
}

inline double slice_interp(const TimeSlice& s, double x) {
    return interp_uniform(s.u, s.x_lo(), s.x[1] - s.x[0], x);
}
inline double slice_interp_w(const TimeSlice& s, double x) {
    return interp_uniform(s.w, s.x_lo(), s.x[1] - s.x[0], x);
}

inline void degeneracy_precheck(const Problem& p, const BoundaryCondition& bc,
                                double t0, double T) {
    if (bc.kind != BcKind::dissipative) return;
    const double x = bc.side == Side::left ? 0.0 : p.L;
    for (int i = 0; i <= 1024; ++i) {
        const double t = t0 + T * double(i) / 1024.0;
        const double c0 = p.c0(t, x);
        if (std::fabs(bc.beta - 1.0 / c0) < 1e-8)
            throw PipelineError(
                "reconstruct",
                std::string("degenerate dissipative boundary at ") +
                    side_name(bc.side) +
                    ": beta = " + std::to_string(bc.beta) +
                    " meets 1/c(t," + (bc.side == Side::left ? "0" : "L") +
                    ",0,0,0) at t = " + std::to_string(t),
                ErrorCode::boundary_degeneracy);
    }
}

struct BackwardPieces {
    Grid grid;
    InitialData init;
};

inline BackwardPieces backward_setup(const Problem& p, double t0,
                                     double T_tilde, double obs_dt, int nx_out,
                                     double cfl_safety,
                                     const std::function<double(double)>& Phi,
                                     const std::function<double(double)>& Psi) {
    BackwardPieces bp;
    bp.grid.t0 = t0;
    bp.grid.t1 = T_tilde;
    bp.grid.nx = nx_out;
    bp.grid.L = p.L;
    const int nt_cfl = suggest_nt(p, t0, T_tilde, nx_out, cfl_safety);
    const int nt_obs = int(std::ceil((T_tilde - t0) / obs_dt));
    bp.grid.nt = std::max({nt_cfl, nt_obs, 8});

    bp.init.u.resize(std::size_t(nx_out) + 1);
    bp.init.w.resize(std::size_t(nx_out) + 1);
    for (int j = 0; j <= nx_out; ++j) {
        const double x = bp.grid.x(j);
        bp.init.u[std::size_t(j)] = Phi(x);
        bp.init.w[std::size_t(j)] = Psi(x);
    }
    bp.init.v = sampled_derivative(bp.init.u, bp.grid.dx());
    return bp;
}

inline void finish_result(ReconstructionResult& r, const Problem& p,
                          const Field& backward,
                          const std::vector<NormedSeries>& obs_series,
                          const std::vector<NormedSeries>& h_series,
                          double guard_c1) {
    const Grid& g = backward.grid;
    r.x.resize(std::size_t(g.nx) + 1);
    r.phi_hat.resize(r.x.size());
    r.psi_hat.resize(r.x.size());
    for (int j = 0; j <= g.nx; ++j) {
        r.x[std::size_t(j)] = g.x(j);
        r.phi_hat[std::size_t(j)] = backward.at(0, j).u;
        r.psi_hat[std::size_t(j)] = backward.at(0, j).w;
    }
    r.guard.epsilon = p.guard_epsilon;
    r.guard.c1_bound = std::max(guard_c1, backward.c1_norm());
    if (!r.guard.passes())
        r.warnings.push_back(
            "reconstruct: smallness guard breached (C1 bound " +
            std::to_string(r.guard.c1_bound) + " > epsilon " +
            std::to_string(r.guard.epsilon) + ")");
    r.ratio = observability_ratio({r.phi_hat, 2, g.dx()},
                                  {r.psi_hat, 1, g.dx()}, obs_series, h_series);
}

} // namespace detail

// Two-sided reconstruction from observations at both ends.
inline ReconstructionResult
reconstruct_two_sided(const Problem& p, const Observation& obs_left,
                      const Observation& obs_right, double T,
                      const ReconstructOptions& opt = {}) {
    const double t0 = p.t0;
    detail::check_window(obs_left, t0, T, "left");
    detail::check_window(obs_right, t0, T, "right");

    const TimeCondition tc =
        check_time_condition(p, t0, T, ObservationMode::two_sided);
    if (!tc.passes)
        throw PipelineError(
            "reconstruct",
            "two-sided observability-time condition fails: integral " +
                std::to_string(tc.integral_value) +
                " <= threshold L = " + std::to_string(tc.threshold) +
                "; the determinate domains do not intersect on this window",
            ErrorCode::time_condition_failed);

    const TracePair tr_l = assemble_trace(obs_left, p.bc_left);
    const TracePair tr_r = assemble_trace(obs_right, p.bc_right);
    const double obs_dt = tr_l.dt();

    SidewaysData data_l{Side::left, tr_l.a, tr_l.b, t0, t0 + T};
    SidewaysData data_r{Side::right, tr_r.a, tr_r.b, t0, t0 + T};
    SidewaysOptions sopt;
    sopt.cfl_ratio = opt.sideways_cfl;
    const Field f_dr =
        solve_cauchy_sideways(p, data_l, sideways_grid(p, data_l, sopt.cfl_ratio), sopt);
    const Field f_dl =
        solve_cauchy_sideways(p, data_r, sideways_grid(p, data_r, sopt.cfl_ratio), sopt);

    const DeterminateDomain dom_r = domain_from_sideways(f_dr);
    const DeterminateDomain dom_l = domain_from_sideways(f_dl);
    const TtildeResult tt =
        find_Ttilde(dom_r, dom_l, ObservationMode::two_sided);

    const TimeSlice sl_r = extract_time_slice(f_dr, tt.T_tilde);
    const TimeSlice sl_l = extract_time_slice(f_dl, tt.T_tilde);
    const double glue_lo = std::max(tt.overlap_lo, sl_l.x_lo());
    const double glue_hi = std::min(tt.overlap_hi, sl_r.x_hi());
    if (!(glue_lo <= glue_hi))
        throw PipelineError("reconstruct",
                            "sideways solutions do not overlap at T~ (domain "
                            "coverage too thin at this resolution)",
                            ErrorCode::no_intersection);
    const double x_glue = 0.5 * (glue_lo + glue_hi);

    ReconstructionResult r;
    r.T_tilde = tt.T_tilde;
    r.domain_info = tt;

    // Mismatch of the two restrictions on the overlap: both sideways
    // solutions restrict the same solution, so they must agree up to
    // discretization error.
    {
        double mm = 0.0;
        const int samples = 64;
        for (int i = 0; i <= samples; ++i) {
            const double x =
                glue_lo + (glue_hi - glue_lo) * double(i) / double(samples);
            mm = std::max(mm, std::fabs(detail::slice_interp(sl_r, x) -
                                        detail::slice_interp(sl_l, x)));
            mm = std::max(mm, std::fabs(detail::slice_interp_w(sl_r, x) -
                                        detail::slice_interp_w(sl_l, x)));
        }
        r.overlap_mismatch = mm;
    }

    auto Phi = [&](double x) {
        return x <= x_glue ? detail::slice_interp(sl_r, x)
                           : detail::slice_interp(sl_l, x);
    };
    auto Psi = [&](double x) {
        return x <= x_glue ? detail::slice_interp_w(sl_r, x)
                           : detail::slice_interp_w(sl_l, x);
    };
    auto bp = detail::backward_setup(p, t0, tt.T_tilde, obs_dt, opt.nx_out,
                                     opt.backward_cfl_safety, Phi, Psi);

    const BoundaryCondition bc_a = BoundaryCondition::dirichlet(
        Side::left, BoundaryFunc::from_samples(
                        detail::restrict_samples(tr_l.a, t0, obs_dt, tt.T_tilde),
                        t0, obs_dt));
    const BoundaryCondition bc_abar = BoundaryCondition::dirichlet(
        Side::right, BoundaryFunc::from_samples(
                         detail::restrict_samples(tr_r.a, t0, obs_dt, tt.T_tilde),
                         t0, obs_dt));

    r.compat_residual_left =
        std::fabs(Phi(0.0) - bc_a.h.value(tt.T_tilde));
    r.compat_residual_right =
        std::fabs(Phi(p.L) - bc_abar.h.value(tt.T_tilde));

    const Field bw = solve_mixed(p, bp.grid, TimeDirection::backward, bp.init,
                                 bc_a, bc_abar);

    for (const Field* f : {&f_dr, &f_dl, &bw})
        for (const std::string& wrn : f->warnings) r.warnings.push_back(wrn);

    const std::vector<NormedSeries> obs_series{
        {obs_left.k, obs_left.d, obs_dt}, {obs_right.k, obs_right.d, obs_dt}};
    const std::vector<NormedSeries> h_series{
        {sample_func(p.bc_left.h.value, t0, obs_dt, tr_l.a.size()),
         p.bc_left.l(), obs_dt},
        {sample_func(p.bc_right.h.value, t0, obs_dt, tr_r.a.size()),
         p.bc_right.l(), obs_dt}};
    detail::finish_result(r, p, bw, obs_series, h_series,
                          std::max(f_dr.c1_norm(), f_dl.c1_norm()));
    return r;
}

// One-sided reconstruction from the observation at x=0; the
// unobserved boundary keeps its original physical condition in the
// backward solve, which excludes the degenerate dissipative coefficient
// beta_bar = 1/c(t,L,0,0,0).
inline ReconstructionResult
reconstruct_one_sided(const Problem& p, const Observation& obs, double T,
                      const ReconstructOptions& opt = {}) {
    const double t0 = p.t0;
    detail::check_window(obs, t0, T, "left");
    if (obs.side != Side::left)
        throw ValidationError("reconstruct",
                              "one-sided reconstruction observes at x=0 (use "
                              "the mirrored variant for x=L)");

    const TimeCondition tc =
        check_time_condition(p, t0, T, ObservationMode::one_sided);
    if (!tc.passes)
        throw PipelineError(
            "reconstruct",
            "one-sided observability-time condition fails: integral " +
                std::to_string(tc.integral_value) +
                " <= threshold 2L = " + std::to_string(tc.threshold) +
                "; the determinate domain cannot traverse the strip",
            ErrorCode::time_condition_failed);
    detail::degeneracy_precheck(p, p.bc_right, t0, T);

    const TracePair tr = assemble_trace(obs, p.bc_left);
    const double obs_dt = tr.dt();
    SidewaysData data{Side::left, tr.a, tr.b, t0, t0 + T};
    SidewaysOptions sopt;
    sopt.cfl_ratio = opt.sideways_cfl;
    sopt.require_full_traversal = false;
    const Field f_dr =
        solve_cauchy_sideways(p, data, sideways_grid(p, data, sopt.cfl_ratio), sopt);

    const DeterminateDomain dom_r = domain_from_sideways(f_dr);
    const TtildeResult tt =
        find_Ttilde(dom_r, std::nullopt, ObservationMode::one_sided);

    const TimeSlice sl = extract_time_slice(f_dr, tt.T_tilde);
    if (sl.x_lo() > 0.0 || sl.x_hi() < p.L - f_dr.grid.dx() * 1.5)
        throw PipelineError("reconstruct",
                            "sideways solution does not span [0, L] at T~",
                            ErrorCode::no_intersection);

    ReconstructionResult r;
    r.T_tilde = tt.T_tilde;
    r.domain_info = tt;

    auto Phi = [&](double x) { return detail::slice_interp(sl, x); };
    auto Psi = [&](double x) { return detail::slice_interp_w(sl, x); };
    auto bp = detail::backward_setup(p, t0, tt.T_tilde, obs_dt, opt.nx_out,
                                     opt.backward_cfl_safety, Phi, Psi);

    const BoundaryCondition bc_a = BoundaryCondition::dirichlet(
        Side::left, BoundaryFunc::from_samples(
                        detail::restrict_samples(tr.a, t0, obs_dt, tt.T_tilde),
                        t0, obs_dt));
    r.compat_residual_left = std::fabs(Phi(0.0) - bc_a.h.value(tt.T_tilde));
    r.compat_residual_right = 0.0;

    const Field bw = solve_mixed(p, bp.grid, TimeDirection::backward, bp.init,
                                 bc_a, p.bc_right);

    for (const Field* f : {&f_dr, &bw})
        for (const std::string& wrn : f->warnings) r.warnings.push_back(wrn);

    const std::vector<NormedSeries> obs_series{{obs.k, obs.d, obs_dt}};
    const std::vector<NormedSeries> h_series{
        {sample_func(p.bc_left.h.value, t0, obs_dt, tr.a.size()),
         p.bc_left.l(), obs_dt},
        {sample_func(p.bc_right.h.value, t0, obs_dt, tr.a.size()),
         p.bc_right.l(), obs_dt}};
    detail::finish_result(r, p, bw, obs_series, h_series, f_dr.c1_norm());
    return r;
}

// Mirrored one-sided variant: the observed value is taken at x=L. Realized
// by the exact reflection x -> L - x, under which the boundary family at
// x=L maps onto the family at x=0 and the degeneracy exclusion lands on
// beta = 1/c(t,0,0,0,0).
inline ReconstructionResult
reconstruct_one_sided_right(const Problem& p, const Observation& obs, double T,
                            const ReconstructOptions& opt = {}) {
    if (obs.side != Side::right)
        throw ValidationError("reconstruct",
                              "mirrored one-sided reconstruction observes at "
                              "x=L");
    const Problem q = reflect_problem(p);
    Observation obs_ref = obs;
    obs_ref.side = Side::left;
    if (obs.bc_kind == BcKind::dirichlet)
        for (double& v : obs_ref.k) v = -v; // u_x flips under reflection
    ReconstructionResult r = reconstruct_one_sided(q, obs_ref, T, opt);
    std::reverse(r.phi_hat.begin(), r.phi_hat.end());
    std::reverse(r.psi_hat.begin(), r.psi_hat.end());
    std::swap(r.compat_residual_left, r.compat_residual_right);
    return r;
}

// Self-consistency experiment: simulate the problem's own mixed problem on
// the given forward grid, extract the observations the mode calls for, and
// reconstruct the initial data from them.
inline ReconstructionResult
reconstruct_from_simulation(const Problem& p, const Grid& forward_grid,
                            ReconstructionMode mode,
                            const ReconstructOptions& opt = {},
                            Field* forward_out = nullptr) {
    const Field fwd = simulate_forward(p, forward_grid);
    if (forward_out) *forward_out = fwd;
    const double T = forward_grid.t1 - forward_grid.t0;
    switch (mode) {
    case ReconstructionMode::two_sided:
        return reconstruct_two_sided(p, extract_observation(fwd, p.bc_left),
                                     extract_observation(fwd, p.bc_right), T,
                                     opt);
    case ReconstructionMode::one_sided_left:
        return reconstruct_one_sided(p, extract_observation(fwd, p.bc_left), T,
                                     opt);
    case ReconstructionMode::one_sided_right:
        return reconstruct_one_sided_right(
            p, extract_observation(fwd, p.bc_right), T, opt);
    }
    throw ValidationError("reconstruct", "unknown mode");
}

} // namespace waveobs
