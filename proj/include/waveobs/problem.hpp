#pragma once

// Problem definition: equation coefficients c and f, the spatial interval
// [0, L], a boundary condition on each side, and initial data (phi, psi).
// Construction validates the standing hypotheses c > 0 and f(.,0,0,0) = 0
// on a sample lattice. Also houses corner compatibility checks, the
// rotationally symmetric reduction, reflection x -> L - x, and a registry
// of named test instances.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "waveobs/errors.hpp"
#include "waveobs/expr.hpp"
#include "waveobs/fd.hpp"

namespace waveobs {

// Scalar field of (t, x, u, u_x, u_t).
using Coeff5 =
    std::function<double(double t, double x, double u, double v, double w)>;

inline Coeff5 coeff_from_expr(expr::Expression e) {
    if (e.used_mask() & (1u << static_cast<int>(expr::Var::r)))
        throw ValidationError("problem",
                              "coefficient '" + e.source() +
                                  "' may not use variable 'r'; r is only "
                                  "available in spherical input fields");
    auto shared = std::make_shared<expr::Expression>(std::move(e));
    return [shared](double t, double x, double u, double v, double w) {
        const double vals[6] = {t, x, u, v, w, 0.0};
        return shared->eval_raw(vals);
    };
}

inline Coeff5 coeff_from_expr(std::string_view source) {
    return coeff_from_expr(expr::Expression::parse(source));
}

// Function of a single variable (x for data, t for boundary functions).
inline Func1 func1_from_expr(expr::Expression e, expr::Var var) {
    const std::uint8_t allowed = std::uint8_t(1u << static_cast<int>(var));
    if (e.used_mask() & ~allowed)
        throw ValidationError(
            "problem", "expression '" + e.source() + "' may only use variable '" +
                           std::string(expr::kVarNames[static_cast<int>(var)]) +
                           "'");
    auto shared = std::make_shared<expr::Expression>(std::move(e));
    const int slot = static_cast<int>(var);
    return [shared, slot](double s) {
        double vals[6] = {0, 0, 0, 0, 0, 0};
        vals[slot] = s;
        return shared->eval_raw(vals);
    };
}

inline Func1 func1_from_expr(std::string_view source, expr::Var var) {
    return func1_from_expr(expr::Expression::parse(source), var);
}

// A boundary function h(t) with a differentiation rule attached, so the
// Dirichlet rewriting v1 + v3 = 2 h'(t) has one source of h'.
struct BoundaryFunc {
    Func1 value;
    Func1 deriv;

    static BoundaryFunc from_callable(Func1 f) {
        BoundaryFunc b;
        b.value = f;
        b.deriv = [f](double t) { return deriv1(f, t); };
        return b;
    }
    static BoundaryFunc from_expr(std::string_view source) {
        return from_callable(func1_from_expr(source, expr::Var::t));
    }
    // Uniform samples on [t0, t0 + n*dt]; derivative of the samples.
    static BoundaryFunc from_samples(std::vector<double> vals, double t0,
                                     double dt) {
        BoundaryFunc b;
        auto dv = sampled_derivative(vals, dt);
        b.value = [vals = std::move(vals), t0, dt](double t) {
            return interp_uniform(vals, t0, dt, t);
        };
        b.deriv = [dv = std::move(dv), t0, dt](double t) {
            return interp_uniform(dv, t0, dt, t);
        };
        return b;
    }
    BoundaryFunc negated() const {
        auto v = value, d = deriv;
        return {[v](double t) { return -v(t); }, [d](double t) { return -d(t); }};
    }
};

enum class Side { left, right };
inline const char* side_name(Side s) { return s == Side::left ? "x=0" : "x=L"; }

enum class BcKind { dirichlet, neumann, robin, dissipative };
inline const char* bc_kind_name(BcKind k) {
    switch (k) {
    case BcKind::dirichlet: return "dirichlet";
    case BcKind::neumann: return "neumann";
    case BcKind::robin: return "robin";
    case BcKind::dissipative: return "dissipative";
    }
    return "?";
}

struct BoundaryCondition {
    BcKind kind = BcKind::dirichlet;
    Side side = Side::left;
    double alpha = 0.0; // Robin coefficient, > 0
    double beta = 0.0;  // dissipative coefficient, > 0
    BoundaryFunc h = BoundaryFunc::from_expr("0");

    // Norm order of the boundary function (2 for Dirichlet, 1 otherwise).
    int l() const { return kind == BcKind::dirichlet ? 2 : 1; }
    // Norm order of the observed value (1 for Dirichlet, 2 otherwise).
    int d() const { return kind == BcKind::dirichlet ? 1 : 2; }

    static BoundaryCondition dirichlet(Side s, BoundaryFunc h) {
        return {BcKind::dirichlet, s, 0.0, 0.0, std::move(h)};
    }
    static BoundaryCondition neumann(Side s, BoundaryFunc h) {
        return {BcKind::neumann, s, 0.0, 0.0, std::move(h)};
    }
    static BoundaryCondition robin(Side s, double alpha, BoundaryFunc h) {
        if (alpha <= 0.0)
            throw ValidationError("problem", "Robin coefficient must be > 0");
        return {BcKind::robin, s, alpha, 0.0, std::move(h)};
    }
    static BoundaryCondition dissipative(Side s, double beta, BoundaryFunc h) {
        if (beta <= 0.0)
            throw ValidationError("problem",
                                  "dissipative coefficient must be > 0");
        return {BcKind::dissipative, s, 0.0, beta, std::move(h)};
    }

    // Boundary relation written as u_x + sgn*coef*q = h with q in {u, u_t}:
    // sgn is -1 at x=0 and +1 at x=L.
    double relation_sign() const { return side == Side::left ? -1.0 : 1.0; }
};

// Runtime stand-in for the "sufficiently small" hypotheses: the measured
// discrete C1 norm of a computed solution against a configurable epsilon.
struct SmallnessGuard {
    double epsilon = 0.1;
    double c1_bound = 0.0;
    bool passes() const { return c1_bound <= epsilon; }
};

struct Problem {
    Coeff5 c;
    Coeff5 f;
    double L = 1.0;
    double t0 = 0.0;
    BoundaryCondition bc_left;
    BoundaryCondition bc_right;
    Func1 phi;
    Func1 psi;
    double guard_epsilon = 0.1;
    double compat_tol = 1e-6;

    double c0(double t, double x) const { return c(t, x, 0.0, 0.0, 0.0); }
};

// Min and max of c(t,x,0,0,0) on an (nt+1) x (nx+1) lattice over
// [t_lo, t_hi] x [0, L].
inline std::pair<double, double> c_zero_min_max(const Problem& p, double t_lo,
                                                double t_hi, int nt = 64,
                                                int nx = 64) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i <= nt; ++i) {
        const double t = t_lo + (t_hi - t_lo) * double(i) / double(nt);
        for (int j = 0; j <= nx; ++j) {
            const double x = p.L * double(j) / double(nx);
            const double v = p.c0(t, x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

// Hypothesis validation on a 64x64 zero-state lattice over
// [t0, t0 + t_window] x [0, L].
inline void validate_hypotheses(const Problem& p, double t_window) {
    if (!(p.L > 0.0))
        throw ValidationError("problem", "L must be > 0",
                              ErrorCode::hypothesis_violation);
    if (!std::isfinite(p.t0) || !std::isfinite(t_window) || t_window <= 0.0)
        throw ValidationError("problem", "t0 and the time window must be finite",
                              ErrorCode::hypothesis_violation);
    constexpr int kN = 64;
    for (int i = 0; i <= kN; ++i) {
        const double t = p.t0 + t_window * double(i) / double(kN);
        for (int j = 0; j <= kN; ++j) {
            const double x = p.L * double(j) / double(kN);
            const double cv = p.c0(t, x);
            if (!(cv > 0.0))
                throw ValidationError(
                    "problem",
                    "hypothesis violation: c(t,x,0,0,0) = " + std::to_string(cv) +
                        " <= 0 at (t=" + std::to_string(t) +
                        ", x=" + std::to_string(x) + ")",
                    ErrorCode::hypothesis_violation);
            const double fv = p.f(t, x, 0.0, 0.0, 0.0);
            if (!(std::fabs(fv) <= 1e-12))
                throw ValidationError(
                    "problem",
                    "hypothesis violation: f(t,x,0,0,0) = " + std::to_string(fv) +
                        " != 0 at (t=" + std::to_string(t) +
                        ", x=" + std::to_string(x) + ")",
                    ErrorCode::hypothesis_violation);
        }
    }
}

inline Problem make_problem(Coeff5 c, Coeff5 f, double L, double t0,
                            BoundaryCondition bc_left,
                            BoundaryCondition bc_right, Func1 phi, Func1 psi,
                            double validation_window = 2.0,
                            double guard_epsilon = 0.1) {
    Problem p;
    p.c = std::move(c);
    p.f = std::move(f);
    p.L = L;
    p.t0 = t0;
    p.bc_left = std::move(bc_left);
    p.bc_right = std::move(bc_right);
    p.phi = std::move(phi);
    p.psi = std::move(psi);
    p.guard_epsilon = guard_epsilon;
    p.bc_left.side = Side::left;
    p.bc_right.side = Side::right;
    validate_hypotheses(p, validation_window);
    return p;
}

// ---------------------------------------------------------------------------
// Corner compatibility

struct CompatLevel {
    bool applicable = false;
    double residual = 0.0;
    bool pass = true;
};

struct CornerReport {
    Side side = Side::left;
    std::array<CompatLevel, 3> level{};
};

struct CompatReport {
    std::array<CornerReport, 2> corner{};
    double tol = 1e-6;

    bool all_pass() const {
        for (const auto& c : corner)
            for (const auto& l : c.level)
                if (l.applicable && !l.pass) return false;
        return true;
    }
};

// Residuals of the compatibility conditions at the two corners (t0, 0) and
// (t0, L), up to the requested order. The boundary function of a Dirichlet
// condition enters with orders 0..2; the other kinds only need orders 0..1
// (their boundary functions are C1 data). u_tt is eliminated through the
// equation: u_tt = c^2 phi'' + f at the corner state.
inline CompatReport check_compatibility(const Problem& p, int order = 2) {
    if (order < 0 || order > 2)
        throw ValidationError("problem", "compatibility order must be 0, 1 or 2");
    CompatReport rep;
    rep.tol = p.compat_tol;

    auto corner_state = [&](double x) {
        struct S {
            double P, P1, P2, Q, Q1, G;
        } s;
        s.P = p.phi(x);
        s.P1 = deriv1(p.phi, x);
        s.P2 = deriv2(p.phi, x);
        s.Q = p.psi(x);
        s.Q1 = deriv1(p.psi, x);
        const double cc = p.c(p.t0, x, s.P, s.P1, s.Q);
        s.G = cc * cc * s.P2 + p.f(p.t0, x, s.P, s.P1, s.Q);
        return s;
    };
    // x-derivative of u_tt(t0, .) for the Dirichlet level-2 Neumann-like
    // combinations is not needed; Dirichlet level 2 compares h'' with u_tt.
    for (int ci = 0; ci < 2; ++ci) {
        const Side side = ci == 0 ? Side::left : Side::right;
        const BoundaryCondition& bc = side == Side::left ? p.bc_left : p.bc_right;
        const double xc = side == Side::left ? 0.0 : p.L;
        const auto s = corner_state(xc);
        const double H = bc.h.value(p.t0);
        const double H1 = bc.h.deriv(p.t0);
        const double sgn = bc.relation_sign();

        CornerReport& cr = rep.corner[std::size_t(ci)];
        cr.side = side;
        auto set = [&](int lvl, double res) {
            cr.level[std::size_t(lvl)].applicable = true;
            cr.level[std::size_t(lvl)].residual = res;
            cr.level[std::size_t(lvl)].pass = std::fabs(res) <= rep.tol;
        };

        switch (bc.kind) {
        case BcKind::dirichlet: {
            if (order >= 0) set(0, H - s.P);
            if (order >= 1) set(1, H1 - s.Q);
            if (order >= 2) {
                const double H2 = deriv2(bc.h.value, p.t0);
                set(2, H2 - s.G);
            }
            break;
        }
        case BcKind::neumann: {
            if (order >= 0) set(0, H - s.P1);
            if (order >= 1) set(1, H1 - s.Q1);
            break;
        }
        case BcKind::robin: {
            if (order >= 0) set(0, H - (s.P1 + sgn * bc.alpha * s.P));
            if (order >= 1) set(1, H1 - (s.Q1 + sgn * bc.alpha * s.Q));
            break;
        }
        case BcKind::dissipative: {
            if (order >= 0) set(0, H - (s.P1 + sgn * bc.beta * s.Q));
            if (order >= 1) set(1, H1 - (s.Q1 + sgn * bc.beta * s.G));
            break;
        }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Rotationally symmetric reduction on a hollow ball r1 <= |x| <= r2.
//
// The n-D wave equation with rotation invariance reduces to a 1-D problem
// on x in [0, r2 - r1] with r = x + r1. Input fields are expressions over
// (t, r, u, v, w) where v stands for r*u_r and w for u_t; the reduced
// source picks up the geometric term ((n-1)/r) * c^2 * u_r.
inline Problem reduce_spherical(int n, double r1, double r2,
                                const expr::Expression& c_nd,
                                const expr::Expression& f_nd, Func1 phi,
                                Func1 psi, BoundaryCondition bc_inner,
                                BoundaryCondition bc_outer, double t0 = 0.0,
                                double validation_window = 2.0) {
    if (!(r1 > 0.0))
        throw ValidationError("problem",
                              "spherical reduction requires r1 > 0 (the "
                              "geometric term (n-1)/r is singular at r=0)",
                              ErrorCode::bad_geometry);
    if (!(r2 > r1))
        throw ValidationError("problem", "spherical reduction requires r2 > r1",
                              ErrorCode::bad_geometry);
    if (n < 1)
        throw ValidationError("problem", "spherical dimension must be >= 1",
                              ErrorCode::bad_geometry);

    auto c_shared = std::make_shared<expr::Expression>(c_nd);
    auto f_shared = std::make_shared<expr::Expression>(f_nd);
    auto eval_nd = [r1](const expr::Expression& e, double t, double x, double u,
                        double v, double w) {
        const double r = x + r1;
        const double vals[6] = {t, x, u, r * v, w, r};
        return e.eval_raw(vals);
    };
    Coeff5 c_eff = [c_shared, eval_nd](double t, double x, double u, double v,
                                       double w) {
        return eval_nd(*c_shared, t, x, u, v, w);
    };
    Coeff5 f_eff = [c_shared, f_shared, eval_nd, n, r1](double t, double x,
                                                        double u, double v,
                                                        double w) {
        const double base = eval_nd(*f_shared, t, x, u, v, w);
        if (n == 1) return base;
        const double cc = eval_nd(*c_shared, t, x, u, v, w);
        return base + (double(n - 1) / (x + r1)) * cc * cc * v;
    };
    return make_problem(std::move(c_eff), std::move(f_eff), r2 - r1, t0,
                        std::move(bc_inner), std::move(bc_outer),
                        std::move(phi), std::move(psi), validation_window);
}

// ---------------------------------------------------------------------------
// Reflection x -> L - x. Maps the boundary family at x=L onto the family
// at x=0 (and vice versa); u_x flips sign, so non-Dirichlet boundary
// functions are negated.
inline BoundaryCondition reflect_bc(const BoundaryCondition& bc) {
    BoundaryCondition r = bc;
    r.side = bc.side == Side::left ? Side::right : Side::left;
    if (bc.kind != BcKind::dirichlet) r.h = bc.h.negated();
    return r;
}

inline Problem reflect_problem(const Problem& p) {
    Problem r = p;
    const double L = p.L;
    auto c = p.c, f = p.f;
    r.c = [c, L](double t, double x, double u, double v, double w) {
        return c(t, L - x, u, -v, w);
    };
    r.f = [f, L](double t, double x, double u, double v, double w) {
        return f(t, L - x, u, -v, w);
    };
    auto phi = p.phi, psi = p.psi;
    if (phi) r.phi = [phi, L](double x) { return phi(L - x); };
    if (psi) r.psi = [psi, L](double x) { return psi(L - x); };
    r.bc_left = reflect_bc(p.bc_right);
    r.bc_right = reflect_bc(p.bc_left);
    return r;
}

// ---------------------------------------------------------------------------
// Catalog of named instances.

inline Problem catalog(const std::string& name) {
    auto zero1 = [](double) { return 0.0; };
    auto dir0 = [](Side s) {
        return BoundaryCondition::dirichlet(s, BoundaryFunc::from_expr("0"));
    };
    std::string c_src;
    if (name == "linear-unit") c_src = "1";
    else if (name == "nonauto-sin") c_src = "2+sin(t)";
    else if (name == "nonauto-decay") c_src = "exp(-t)";
    else if (name == "quasilinear-small") c_src = "1+0.1*u";
    else if (name == "autonomous-variable") c_src = "1+x*(1-x)";
    else
        throw ValidationError(
            "problem",
            "unknown catalog name '" + name +
                "' (known: linear-unit, nonauto-sin, nonauto-decay, "
                "quasilinear-small, autonomous-variable)",
            ErrorCode::unknown_catalog_name);
    return make_problem(coeff_from_expr(c_src), coeff_from_expr("0"), 1.0, 0.0,
                        dir0(Side::left), dir0(Side::right), zero1, zero1);
}

} // namespace waveobs
