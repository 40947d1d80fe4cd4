#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "waveobs/reconstruct.hpp"

using namespace waveobs;

namespace {

const double kPi = std::acos(-1.0);

Grid make_grid(double t0, double t1, int nx, int nt, double L = 1.0) {
    Grid g;
    g.t0 = t0;
    g.t1 = t1;
    g.nx = nx;
    g.nt = nt;
    g.L = L;
    return g;
}

Problem dirichlet_problem(const char* c_src, Func1 phi, Func1 psi) {
    return make_problem(
        coeff_from_expr(c_src), coeff_from_expr("0"), 1.0, 0.0,
        BoundaryCondition::dirichlet(Side::left, BoundaryFunc::from_expr("0")),
        BoundaryCondition::dirichlet(Side::right, BoundaryFunc::from_expr("0")),
        std::move(phi), std::move(psi));
}

double sup_diff(const std::vector<double>& a, const Func1& f,
                const std::vector<double>& x) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        e = std::max(e, std::fabs(a[i] - f(x[i])));
    return e;
}

} // namespace

TEST_CASE("zero observations reconstruct exactly zero") {
    auto zero = [](double) { return 0.0; };
    const Problem p = dirichlet_problem("1", zero, zero);
    const ReconstructionResult rec = reconstruct_from_simulation(
        p, make_grid(0, 1.2, 64, 128), ReconstructionMode::two_sided,
        ReconstructOptions{64, 0.95, 0.8});
    for (double v : rec.phi_hat) REQUIRE(v == 0.0);
    for (double v : rec.psi_hat) REQUIRE(v == 0.0);
    CHECK(rec.ratio == 0.0);
    CHECK(rec.overlap_mismatch == 0.0);
}

TEST_CASE("two-sided reconstruction on the unit problem") {
    const Problem p =
        dirichlet_problem("1", [](double x) { return 0.05 * std::sin(kPi * x); },
                          [](double) { return 0.0; });
    Field fwd;
    ReconstructOptions opt;
    opt.nx_out = 200;
    const Grid g = make_grid(0, 1.2, 200, 400);
    const ReconstructionResult rec = reconstruct_from_simulation(
        p, g, ReconstructionMode::two_sided, opt, &fwd);

    CHECK(rec.T_tilde == Catch::Approx(0.6).margin(0.02));
    const double err_phi = sup_diff(rec.phi_hat, p.phi, rec.x);
    const double err_psi = sup_diff(rec.psi_hat, p.psi, rec.x);
    CHECK(err_phi + err_psi <= 0.1);

    // Both sideways restrictions agree on the overlap up to a small
    // multiple of the one-way solver error.
    double one_way = 0.0;
    for (int n = 0; n <= g.nt; ++n)
        for (int j = 0; j <= g.nx; ++j)
            one_way = std::max(
                one_way,
                std::fabs(fwd.at(n, j).u - 0.05 * std::sin(kPi * g.x(j)) *
                                               std::cos(kPi * g.time(n))));
    CHECK(rec.overlap_mismatch <= 5.0 * one_way);
    CHECK(rec.ratio > 0.0);
    CHECK(rec.compat_residual_left <= 10.0 * one_way);
    CHECK(rec.compat_residual_right <= 10.0 * one_way);
}

TEST_CASE("two-sided gate: window below the threshold fails before solving") {
    const Problem p =
        dirichlet_problem("1", [](double x) { return 0.05 * std::sin(kPi * x); },
                          [](double) { return 0.0; });
    try {
        reconstruct_from_simulation(p, make_grid(0, 0.9, 128, 256),
                                    ReconstructionMode::two_sided);
        FAIL("expected a pipeline error");
    } catch (const PipelineError& e) {
        CHECK(e.code() == ErrorCode::time_condition_failed);
    }
}

TEST_CASE("nonautonomous gate: c = 2 + sin t") {
    const Problem p = make_problem(
        coeff_from_expr("2+sin(t)"), coeff_from_expr("0"), 1.0, 0.0,
        BoundaryCondition::dirichlet(Side::left, BoundaryFunc::from_expr("0")),
        BoundaryCondition::dirichlet(Side::right, BoundaryFunc::from_expr("0")),
        [](double x) { return 0.02 * std::sin(kPi * x); },
        [](double) { return 0.0; });

    // T = 0.3 sits below the minimal time (~0.45): rejected.
    CHECK_THROWS_AS(reconstruct_from_simulation(p, make_grid(0, 0.3, 96, 300),
                                                ReconstructionMode::two_sided),
                    PipelineError);

    // T = 0.6 is observable; the pipeline completes with a sane result.
    ReconstructOptions opt;
    opt.nx_out = 96;
    const ReconstructionResult rec = reconstruct_from_simulation(
        p, make_grid(0, 0.6, 96, 600), ReconstructionMode::two_sided, opt);
    const double err = sup_diff(rec.phi_hat, p.phi, rec.x) +
                       sup_diff(rec.psi_hat, p.psi, rec.x);
    CHECK(err <= 0.5 * (0.02 + 0.02 * kPi * 3.0)); // well below data scale
}

TEST_CASE("one-sided reconstruction with the original right condition") {
    const Problem p = make_problem(
        coeff_from_expr("1"), coeff_from_expr("0"), 1.0, 0.0,
        BoundaryCondition::dirichlet(Side::left, BoundaryFunc::from_expr("0")),
        BoundaryCondition::neumann(Side::right, BoundaryFunc::from_expr("0")),
        [](double x) { return 0.05 * std::sin(1.5 * kPi * x); },
        [](double) { return 0.0; });
    ReconstructOptions opt;
    opt.nx_out = 128;
    const ReconstructionResult rec = reconstruct_from_simulation(
        p, make_grid(0, 2.2, 128, 512), ReconstructionMode::one_sided_left, opt);
    CHECK(rec.T_tilde == Catch::Approx(1.1).margin(0.02));
    const double err = sup_diff(rec.phi_hat, p.phi, rec.x) +
                       sup_diff(rec.psi_hat, p.psi, rec.x);
    CHECK(err <= 0.1);

    // Below the one-sided threshold 2L the gate rejects the window.
    CHECK_THROWS_AS(reconstruct_from_simulation(p, make_grid(0, 1.9, 128, 512),
                                                ReconstructionMode::one_sided_left),
                    PipelineError);
}

TEST_CASE("mirrored one-sided variant agrees with the reflected left variant") {
    // Power-of-two grid so reflected node coordinates are exact.
    const Problem a = make_problem(
        coeff_from_expr("1"), coeff_from_expr("0"), 1.0, 0.0,
        BoundaryCondition::dirichlet(Side::left, BoundaryFunc::from_expr("0")),
        BoundaryCondition::neumann(Side::right, BoundaryFunc::from_expr("0")),
        [](double x) { return 0.05 * std::sin(1.5 * kPi * x); },
        [](double) { return 0.0; });
    const Problem b = reflect_problem(a);

    ReconstructOptions opt;
    opt.nx_out = 128;
    const Grid g = make_grid(0, 2.2, 128, 512);
    const ReconstructionResult ra =
        reconstruct_from_simulation(a, g, ReconstructionMode::one_sided_left, opt);
    const ReconstructionResult rb = reconstruct_from_simulation(
        b, g, ReconstructionMode::one_sided_right, opt);

    REQUIRE(ra.phi_hat.size() == rb.phi_hat.size());
    const std::size_t n = ra.phi_hat.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        worst = std::max(worst,
                         std::fabs(rb.phi_hat[n - 1 - j] - ra.phi_hat[j]));
        worst = std::max(worst,
                         std::fabs(rb.psi_hat[n - 1 - j] - ra.psi_hat[j]));
    }
    CHECK(worst <= 1e-10);
    CHECK(ra.T_tilde == Catch::Approx(rb.T_tilde).margin(1e-12));
}

TEST_CASE("degenerate dissipative coefficients are rejected up front") {
    auto zero_obs = [](Side side, BcKind kind, double T, int nt) {
        Observation o;
        o.side = side;
        o.bc_kind = kind;
        o.k.assign(std::size_t(nt) + 1, 0.0);
        o.t0 = 0.0;
        o.t1 = T;
        o.d = kind == BcKind::dirichlet ? 1 : 2;
        return o;
    };

    // beta_bar = 1/c(t,L,0,0,0) at the unobserved right boundary.
    const Problem p = make_problem(
        coeff_from_expr("1"), coeff_from_expr("0"), 1.0, 0.0,
        BoundaryCondition::dirichlet(Side::left, BoundaryFunc::from_expr("0")),
        BoundaryCondition::dissipative(Side::right, 1.0,
                                       BoundaryFunc::from_expr("0")),
        [](double) { return 0.0; }, [](double) { return 0.0; });
    try {
        reconstruct_one_sided(p, zero_obs(Side::left, BcKind::dirichlet, 2.2, 880),
                              2.2);
        FAIL("expected degeneracy rejection");
    } catch (const PipelineError& e) {
        CHECK(e.code() == ErrorCode::boundary_degeneracy);
    }
    // A clearly non-degenerate coefficient passes the same gate.
    const Problem ok = make_problem(
        coeff_from_expr("1"), coeff_from_expr("0"), 1.0, 0.0,
        BoundaryCondition::dirichlet(Side::left, BoundaryFunc::from_expr("0")),
        BoundaryCondition::dissipative(Side::right, 0.4,
                                       BoundaryFunc::from_expr("0")),
        [](double) { return 0.0; }, [](double) { return 0.0; });
    CHECK_NOTHROW(reconstruct_one_sided(
        ok, zero_obs(Side::left, BcKind::dirichlet, 2.2, 880), 2.2));

    // Mirror case: beta = 1/c(t,0,0,0,0) at the left boundary.
    const Problem q = make_problem(
        coeff_from_expr("1"), coeff_from_expr("0"), 1.0, 0.0,
        BoundaryCondition::dissipative(Side::left, 1.0,
                                       BoundaryFunc::from_expr("0")),
        BoundaryCondition::dirichlet(Side::right, BoundaryFunc::from_expr("0")),
        [](double) { return 0.0; }, [](double) { return 0.0; });
    try {
        reconstruct_one_sided_right(
            q, zero_obs(Side::right, BcKind::dirichlet, 2.2, 880), 2.2);
        FAIL("expected degeneracy rejection");
    } catch (const PipelineError& e) {
        CHECK(e.code() == ErrorCode::boundary_degeneracy);
    }
}

TEST_CASE("reconstruction error contracts along a grid-doubling ladder") {
    const Problem p =
        dirichlet_problem("1", [](double x) { return 0.05 * std::sin(kPi * x); },
                          [](double) { return 0.0; });
    double prev = 1e300;
    for (int lvl = 0; lvl < 4; ++lvl) {
        ReconstructOptions opt;
        opt.nx_out = 100 << lvl;
        const ReconstructionResult rec = reconstruct_from_simulation(
            p, make_grid(0, 1.2, 100 << lvl, 200 << lvl),
            ReconstructionMode::two_sided, opt);
        const double err = sup_diff(rec.phi_hat, p.phi, rec.x) +
                           sup_diff(rec.psi_hat, p.psi, rec.x);
        REQUIRE(err <= prev * 1.1); // monotone within 10% slack
        prev = err;
    }
}

TEST_CASE("smallness guard breach is a warning, not an error") {
    // Amplitude 0.2 pushes the C1 norm past the default epsilon 0.1.
    const Problem p =
        dirichlet_problem("1", [](double x) { return 0.2 * std::sin(kPi * x); },
                          [](double) { return 0.0; });
    ReconstructOptions opt;
    opt.nx_out = 96;
    const ReconstructionResult rec = reconstruct_from_simulation(
        p, make_grid(0, 1.2, 96, 192), ReconstructionMode::two_sided, opt);
    CHECK_FALSE(rec.guard.passes());
    bool saw_guard_warning = false;
    for (const auto& w : rec.warnings)
        if (w.find("smallness guard") != std::string::npos)
            saw_guard_warning = true;
    CHECK(saw_guard_warning);
}
