#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "waveobs/domains.hpp"
#include "waveobs/hypersolve.hpp"

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

Problem problem_with(const char* c_src, double L, Func1 phi, Func1 psi) {
    return make_problem(
        coeff_from_expr(c_src), coeff_from_expr("0"), L, 0.0,
        BoundaryCondition::dirichlet(Side::left, BoundaryFunc::from_expr("0")),
        BoundaryCondition::dirichlet(Side::right, BoundaryFunc::from_expr("0")),
        std::move(phi), std::move(psi));
}

Field zero_sideways(const Problem& p, double T, int nt, Side side) {
    SidewaysData data;
    data.side = side;
    data.t0 = 0.0;
    data.t1 = T;
    data.a.assign(std::size_t(nt) + 1, 0.0);
    data.b.assign(std::size_t(nt) + 1, 0.0);
    return solve_cauchy_sideways(p, data, sideways_grid(p, data));
}

} // namespace

TEST_CASE("traced curves at unit speed are straight lines") {
    auto zero = [](double) { return 0.0; };
    const Problem p = problem_with("1", 1.0, zero, zero);
    const Grid g = make_grid(0, 2, 64, 256);
    const Field f = simulate_forward(p, g);

    const Curve x2 = trace_curve(p, f, CurveLabel::x2); // x2(t) = t, clipped at 1
    CHECK(x2.start_t == 0.0);
    CHECK(x2.start_x == 0.0);
    for (std::size_t i = 0; i < x2.t.size(); ++i)
        REQUIRE(std::fabs(x2.x[i] - std::min(x2.t[i], 1.0)) <= 1e-9);
    CHECK(x2.t.back() == Catch::Approx(1.0).margin(1e-9)); // exits at x=1

    const Curve x1 = trace_curve(p, f, CurveLabel::x1); // x1(t) = 2 - t
    for (std::size_t i = 0; i < x1.t.size(); ++i)
        REQUIRE(std::fabs(x1.x[i] - (2.0 - x1.t[i])) <= 1e-9);
    CHECK(x1.t.front() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("traced curve matches the analytic integral of a nonautonomous speed") {
    auto zero = [](double) { return 0.0; };
    const Problem p = problem_with("2+sin(t)", 3.0, zero, zero);
    const Grid g = make_grid(0, 1, 256, 1024, 3.0);
    const Field f = simulate_forward(p, g);
    const Curve x2 = trace_curve(p, f, CurveLabel::x2);
    // x2(t) = 2t + 1 - cos t; spot checks along the trace.
    for (std::size_t i = 0; i < x2.t.size(); i += 64) {
        const double t = x2.t[i];
        REQUIRE(std::fabs(x2.x[i] - (2.0 * t + 1.0 - std::cos(t))) <= 1e-6);
    }
    CHECK(x2.eval_clamped(1.0) ==
          Catch::Approx(3.0 - std::cos(1.0)).margin(1e-6));
}

TEST_CASE("curve slopes are bounded by the wave speed") {
    const Problem p = problem_with(
        "1+0.1*u", 1.0, [](double x) { return 0.02 * std::sin(kPi * x); },
        [](double) { return 0.0; });
    const Grid g = make_grid(0, 1.5, 128, 512);
    const Field f = simulate_forward(p, g);
    const double cmax = 1.0 + 0.1 * f.c1_norm() + 1e-6;
    for (CurveLabel l :
         {CurveLabel::x1, CurveLabel::x2, CurveLabel::x3, CurveLabel::x4}) {
        const Curve c = trace_curve(p, f, l);
        for (std::size_t i = 1; i < c.t.size(); ++i) {
            const double slope =
                (c.x[i] - c.x[i - 1]) / (c.t[i] - c.t[i - 1]);
            REQUIRE(std::fabs(slope) <= cmax + 1e-6);
        }
    }
}

TEST_CASE("x1 stays above x4 (no crossing of same-family curves)") {
    const Problem p = problem_with(
        "1+0.1*u", 1.0, [](double x) { return 0.02 * std::sin(kPi * x); },
        [](double) { return 0.0; });
    const Grid g = make_grid(0, 1.5, 128, 512);
    const Field f = simulate_forward(p, g);
    const Curve x1 = trace_curve(p, f, CurveLabel::x1);
    const Curve x4 = trace_curve(p, f, CurveLabel::x4);
    const double lo = std::max(x1.t.front(), x4.t.front());
    const double hi = std::min(x1.t.back(), x4.t.back());
    for (int i = 0; i <= 200; ++i) {
        const double t = lo + (hi - lo) * double(i) / 200.0;
        REQUIRE(x1.eval_clamped(t) - x4.eval_clamped(t) >= -f.grid.dx());
    }
}

TEST_CASE("two-sided coverage at unit speed") {
    auto zero = [](double) { return 0.0; };
    const Problem p = problem_with("1", 1.0, zero, zero);

    const Field f_dr = zero_sideways(p, 1.2, 480, Side::left);
    const Field f_dl = zero_sideways(p, 1.2, 480, Side::right);
    const DeterminateDomain dr = domain_from_sideways(f_dr);
    const DeterminateDomain dl = domain_from_sideways(f_dl);
    CHECK(dr.side == Side::right);
    CHECK(dl.side == Side::left);

    const TtildeResult tt = find_Ttilde(dr, dl, ObservationMode::two_sided);
    CHECK(tt.T_tilde == Catch::Approx(0.6).margin(0.02));
    CHECK(tt.s_lo == Catch::Approx(0.5).margin(0.02));
    CHECK(tt.s_hi == Catch::Approx(0.7).margin(0.02));
    CHECK(tt.overlap_lo == Catch::Approx(0.4).margin(0.02));
    CHECK(tt.overlap_hi == Catch::Approx(0.6).margin(0.02));

    // Below the threshold T = L the domains cannot intersect.
    const Field s_dr = zero_sideways(p, 0.9, 480, Side::left);
    const Field s_dl = zero_sideways(p, 0.9, 480, Side::right);
    CHECK_THROWS_AS(find_Ttilde(domain_from_sideways(s_dr),
                                domain_from_sideways(s_dl),
                                ObservationMode::two_sided),
                    PipelineError);
}

TEST_CASE("one-sided traversal at unit speed") {
    auto zero = [](double) { return 0.0; };
    const Problem p = problem_with("1", 1.0, zero, zero);

    const Field f22 = zero_sideways(p, 2.2, 880, Side::left);
    const TtildeResult tt = find_Ttilde(domain_from_sideways(f22), std::nullopt,
                                        ObservationMode::one_sided);
    CHECK(tt.T_tilde == Catch::Approx(1.1).margin(0.02));
    CHECK(tt.s_lo == Catch::Approx(1.0).margin(0.02));
    CHECK(tt.s_hi == Catch::Approx(1.2).margin(0.02));

    const Field f19 = zero_sideways(p, 1.9, 880, Side::left);
    CHECK_THROWS_AS(find_Ttilde(domain_from_sideways(f19), std::nullopt,
                                ObservationMode::one_sided),
                    PipelineError);
}

TEST_CASE("enlarging the window never shrinks the covered set") {
    auto zero = [](double) { return 0.0; };
    const Problem p = problem_with("1", 1.0, zero, zero);
    double prev_len = -1.0;
    for (double T : {1.1, 1.3, 1.6, 2.0}) {
        const Field f_dr = zero_sideways(p, T, 512, Side::left);
        const Field f_dl = zero_sideways(p, T, 512, Side::right);
        const TtildeResult tt =
            find_Ttilde(domain_from_sideways(f_dr), domain_from_sideways(f_dl),
                        ObservationMode::two_sided);
        const double len = tt.s_hi - tt.s_lo;
        CHECK(len >= prev_len - 1e-9);
        CHECK(tt.s_lo <= 0.5 + 0.02); // lower end of S stays at L/2
        prev_len = len;
    }
}

TEST_CASE("mismatched windows are rejected") {
    auto zero = [](double) { return 0.0; };
    const Problem p = problem_with("1", 1.0, zero, zero);
    const Field a = zero_sideways(p, 1.2, 480, Side::left);
    const Field b = zero_sideways(p, 1.4, 480, Side::right);
    CHECK_THROWS_AS(find_Ttilde(domain_from_sideways(a),
                                domain_from_sideways(b),
                                ObservationMode::two_sided),
                    ValidationError);
}
