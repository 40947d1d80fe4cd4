#pragma once

// Boundary observations. The observed value is chosen so that together
// with the boundary condition it pins (u, u_x) on the boundary: a
// Dirichlet condition observes u_x, the other families observe u. The
// assembled trace pair (a, b) feeds the sideways Cauchy solves, and the
// discrete C^k norms feed the observability-inequality diagnostics.

#include <cmath>
#include <string>
#include <vector>

#include "waveobs/errors.hpp"
#include "waveobs/fd.hpp"
#include "waveobs/field.hpp"
#include "waveobs/problem.hpp"

namespace waveobs {

struct Observation {
    Side side = Side::left;
    BcKind bc_kind = BcKind::dirichlet;
    std::vector<double> k;
    double t0 = 0.0, t1 = 1.0;
    int d = 1; // norm order of the observed value

    double dt() const { return (t1 - t0) / double(k.size() - 1); }
};

struct TracePair {
    Side side = Side::left;
    std::vector<double> a; // u on the boundary
    std::vector<double> b; // u_x on the boundary
    double t0 = 0.0, t1 = 1.0;

    double dt() const { return (t1 - t0) / double(a.size() - 1); }
};

inline std::vector<double> sample_func(const Func1& f, double t0, double dt,
                                       std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(t0 + double(i) * dt);
    return out;
}

// Reads the observed value off a computed field's boundary column. The
// field already carries u_x as a state component, so no differentiation
// is involved.
inline Observation extract_observation(const Field& f,
                                       const BoundaryCondition& bc) {
    const Grid& g = f.grid;
    const int j = bc.side == Side::left ? 0 : g.nx;
    Observation obs;
    obs.side = bc.side;
    obs.bc_kind = bc.kind;
    obs.t0 = g.t0;
    obs.t1 = g.t1;
    obs.d = bc.d();
    obs.k.resize(std::size_t(g.nt) + 1);
    for (int n = 0; n <= g.nt; ++n) {
        const State& s = f.at(n, j);
        obs.k[std::size_t(n)] = bc.kind == BcKind::dirichlet ? s.v : s.u;
    }
    return obs;
}

// Combines the observed value with the boundary condition into the full
// trace (u, u_x) = (a, b). The boundary relation reads u_x + sgn*alpha*u
// = h (Robin) or u_x + sgn*beta*u_t = h (dissipative) with sgn = -1 at
// x=0 and +1 at x=L; the dissipative case needs k' by finite differences.
inline TracePair assemble_trace(const Observation& obs,
                                const BoundaryCondition& bc) {
    if (obs.side != bc.side || obs.bc_kind != bc.kind)
        throw ValidationError("observe",
                              "observation and boundary condition disagree on "
                              "side or kind");
    const std::size_t n = obs.k.size();
    const double dt = obs.dt();
    const std::vector<double> h = sample_func(bc.h.value, obs.t0, dt, n);

    TracePair tr;
    tr.side = obs.side;
    tr.t0 = obs.t0;
    tr.t1 = obs.t1;
    const double sgn = bc.relation_sign();
    switch (bc.kind) {
    case BcKind::dirichlet:
        tr.a = h;
        tr.b = obs.k;
        break;
    case BcKind::neumann:
        tr.a = obs.k;
        tr.b = h;
        break;
    case BcKind::robin: {
        tr.a = obs.k;
        tr.b.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            tr.b[i] = h[i] - sgn * bc.alpha * obs.k[i];
        break;
    }
    case BcKind::dissipative: {
        tr.a = obs.k;
        const std::vector<double> kd = sampled_derivative(obs.k, dt);
        tr.b.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            tr.b[i] = h[i] - sgn * bc.beta * kd[i];
        break;
    }
    }
    return tr;
}

// Discrete C^order norm: max over derivative orders 0..order of the sup
// norm of the finite-difference derivative (central interior, second-order
// one-sided ends).
inline double discrete_norm(const std::vector<double>& samples, int order,
                            double step) {
    if (order < 0 || order > 2)
        throw ValidationError("observe", "norm order must be 0, 1 or 2");
    if (samples.size() < std::size_t(order) + 1)
        throw ValidationError("observe",
                              "need at least order+1 samples for a C^order "
                              "norm",
                              ErrorCode::too_few_samples);
    auto sup = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double s : v) m = std::max(m, std::fabs(s));
        return m;
    };
    double norm = sup(samples);
    if (order >= 1) {
        std::vector<double> d1;
        if (samples.size() == 2)
            d1 = {(samples[1] - samples[0]) / step,
                  (samples[1] - samples[0]) / step};
        else
            d1 = sampled_derivative(samples, step);
        norm = std::max(norm, sup(d1));
        if (order >= 2) {
            std::vector<double> d2;
            if (samples.size() == 3) {
                const double v =
                    (samples[0] - 2.0 * samples[1] + samples[2]) / (step * step);
                d2 = {v, v, v};
            } else {
                d2 = sampled_second_derivative(samples, step);
            }
            norm = std::max(norm, sup(d2));
        }
    }
    return norm;
}

// A sampled series with its norm order and step, for ratio assembly.
struct NormedSeries {
    std::vector<double> samples;
    int order = 0;
    double step = 1.0;

    double norm() const { return discrete_norm(samples, order, step); }
};

// ||(phi,psi)||_{C2 x C1} / ( ||observations|| + ||boundary functions|| )
// with the product norms realized as maxima. The caller selects which
// observations enter (both sides, or one for the one-sided inequality).
// Equilibrium convention: 0/0 = 0.
inline double observability_ratio(const NormedSeries& phi,
                                  const NormedSeries& psi,
                                  const std::vector<NormedSeries>& observations,
                                  const std::vector<NormedSeries>& boundary_fns) {
    const double num = std::max(phi.norm(), psi.norm());
    double obs_norm = 0.0;
    for (const auto& o : observations) obs_norm = std::max(obs_norm, o.norm());
    double h_norm = 0.0;
    for (const auto& h : boundary_fns) h_norm = std::max(h_norm, h.norm());
    const double den = obs_norm + h_norm;
    if (den == 0.0) {
        if (num == 0.0) return 0.0;
        throw PipelineError("observe",
                            "unobservable datum: nonzero initial data with "
                            "identically zero observations and boundary "
                            "functions",
                            ErrorCode::generic);
    }
    return num / den;
}

} // namespace waveobs
