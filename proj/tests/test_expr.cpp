#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>

#include "waveobs/expr.hpp"

using namespace waveobs;
using expr::Env;
using expr::Expression;
using expr::Var;

namespace {

double ev(const std::string& src, double t = 0, double x = 0, double u = 0,
          double v = 0, double w = 0, double r = 0) {
    return Expression::parse(src).eval(Env::full(t, x, u, v, w, r));
}

} // namespace

TEST_CASE("literal and simple arithmetic") {
    CHECK(ev("1") == 1.0);
    CHECK(ev("2 + t*x", 3.0, 4.0) == 14.0);
    CHECK(ev(".5") == 0.5);
    CHECK(ev("1e-3") == 1e-3);
    CHECK(ev("sin(x)", 0.0, 0.0) == 0.0);
    CHECK_THAT(ev("2 + 0.5*sin(t)", std::acos(-1.0) / 2.0),
               Catch::Matchers::WithinULP(2.5, 1));
}

TEST_CASE("precedence and associativity") {
    CHECK(ev("2^3^2") == 512.0);   // ^ right-associative
    CHECK(ev("-2^2") == -4.0);     // unary minus binds looser than ^
    CHECK(ev("2^-3") == 0.125);    // negated exponent
    CHECK(ev("2*3^2") == 18.0);
    CHECK(ev("1 - 2 - 3") == -4.0);
    CHECK(ev("8/4/2") == 1.0);
    CHECK(ev("2+3*4") == 14.0);
    CHECK(ev("(2+3)*4") == 20.0);
    CHECK(ev("-x^2", 0, 3.0) == -9.0);
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        Expression::parse("u +");
        FAIL("expected a syntax error");
    } catch (const expr::SyntaxError& e) {
        CHECK(e.offset() == 3);
        CHECK(std::string(e.what()).find("operand") != std::string::npos);
    }
    CHECK_THROWS_AS(Expression::parse("(1+2"), expr::SyntaxError);
    CHECK_THROWS_AS(Expression::parse("1 2"), expr::SyntaxError);
    CHECK_THROWS_AS(Expression::parse(""), expr::SyntaxError);
}

TEST_CASE("unknown identifiers and unbound variables") {
    CHECK_THROWS_AS(Expression::parse("foo"), expr::UnknownIdentifierError);
    CHECK_THROWS_AS(Expression::parse("sinh(x)"), expr::UnknownIdentifierError);
    const Expression e = Expression::parse("t + x");
    Env env;
    env.set(Var::x, 1.0); // t left unbound
    CHECK_THROWS_AS(e.eval(env), ValidationError);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(ev("1/x", 0, 0.0), PipelineError);
    CHECK_THROWS_AS(ev("log(x)", 0, 0.0), PipelineError);
    CHECK_THROWS_AS(ev("log(x)", 0, -1.0), PipelineError);
    CHECK_THROWS_AS(ev("sqrt(x)", 0, -1.0), PipelineError);
    CHECK(ev("sqrt(x)", 0, 4.0) == 2.0);
    CHECK_THROWS_AS(ev("(-1)^0.5"), PipelineError);
}

namespace {

std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    std::uniform_real_distribution<double> num(0.0, 10.0);
    const char* vars[] = {"t", "x", "u", "v", "w", "r"};
    const char* funs[] = {"sin", "cos", "exp", "abs", "tanh"};
    switch (pick(rng)) {
    case 0: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", num(rng));
        return buf;
    }
    case 1: return vars[rng() % 6];
    case 2: return "(" + random_expr(rng, depth - 1) + " + " +
                   random_expr(rng, depth - 1) + ")";
    case 3: return "(" + random_expr(rng, depth - 1) + " * " +
                   random_expr(rng, depth - 1) + ")";
    case 4: return "(" + random_expr(rng, depth - 1) + " - " +
                   random_expr(rng, depth - 1) + ")";
    case 5: return std::string(funs[rng() % 5]) + "(" +
                   random_expr(rng, depth - 1) + ")";
    default: return "(-" + random_expr(rng, depth - 1) + ")";
    }
}

} // namespace

TEST_CASE("pretty-print round trip, randomized") {
    std::mt19937_64 rng(20240817);
    for (int i = 0; i < 300; ++i) {
        const std::string src = random_expr(rng, 4);
        const Expression a = Expression::parse(src);
        const Expression b = Expression::parse(a.to_string());
        REQUIRE(a == b);
    }
}

TEST_CASE("binary operators match host arithmetic to 1 ulp") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    const char ops[] = {'+', '-', '*', '/'};
    for (int i = 0; i < 2000; ++i) {
        const double a = dist(rng);
        double b = dist(rng);
        const char op = ops[i % 4];
        if (op == '/' && b == 0.0) b = 1.0;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.17g %c %.17g", a, op, b);
        const double got = ev(buf);
        double want = 0;
        switch (op) {
        case '+': want = a + b; break;
        case '-': want = a - b; break;
        case '*': want = a * b; break;
        case '/': want = a / b; break;
        }
        REQUIRE_THAT(got, Catch::Matchers::WithinULP(want, 1));
    }
    // pow against std::pow on positive bases
    std::uniform_real_distribution<double> pos(0.1, 10.0);
    for (int i = 0; i < 500; ++i) {
        const double a = pos(rng), b = dist(rng) / 25.0;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.17g ^ %.17g", a, b);
        REQUIRE_THAT(ev(buf), Catch::Matchers::WithinULP(std::pow(a, b), 1));
    }
}

TEST_CASE("evaluation is re-entrant on a shared expression") {
    const Expression e = Expression::parse("sin(t)*x + u*v - w/(1+r*r)");
    const Env e1 = Env::full(0.3, 1.0, 2.0, 3.0, 4.0, 5.0);
    const Env e2 = Env::full(-0.7, 2.0, 0.5, 1.5, 2.5, 0.0);
    const double a1 = e.eval(e1), a2 = e.eval(e2);
    for (int i = 0; i < 100; ++i) {
        CHECK(e.eval(e1) == a1);
        CHECK(e.eval(e2) == a2);
    }
}
