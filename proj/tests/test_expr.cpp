#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "worldline/expr.hpp"

using namespace worldline;

namespace {

const UnitSystem nat = UnitSystem::natural();

double eval(const std::string& s, double t) { return Expr::parse(s).evaluate(t, nat); }

// Random expression source for the round-trip property. Produces anything
// the grammar accepts, including nested functions and literal exponents.
std::string random_expression(std::mt19937& rng, int depth) {
    std::uniform_real_distribution<double> coef(-9.9, 9.9);
    std::uniform_int_distribution<int> leaf(0, 3), node(0, 7), expo(2, 5);
    if (depth == 0) {
        switch (leaf(rng)) {
            case 0: return std::to_string(coef(rng));
            case 1: return "t";
            case 2: return "c";
            default: return "pi";
        }
    }
    const auto a = random_expression(rng, depth - 1);
    const auto b = random_expression(rng, depth - 1);
    switch (node(rng)) {
        case 0: return "(" + a + ")+(" + b + ")";
        case 1: return "(" + a + ")-(" + b + ")";
        case 2: return "(" + a + ")*(" + b + ")";
        case 3: return "(" + a + ")/(" + b + ")";
        case 4: return "-(" + a + ")";
        case 5: return "sin(" + a + ")";
        case 6: return "tanh(" + a + ")";
        default: return "(" + a + ")^" + std::to_string(expo(rng));
    }
}

// Differentiable, numerically tame expressions for the derivative property:
// polynomials and trig with small coefficients, no division or sqrt.
std::string random_smooth_expression(std::mt19937& rng, int depth) {
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_int_distribution<int> leaf(0, 1), node(0, 5), expo(2, 4);
    if (depth == 0) return leaf(rng) == 0 ? std::to_string(coef(rng)) : "t";
    const auto a = random_smooth_expression(rng, depth - 1);
    const auto b = random_smooth_expression(rng, depth - 1);
    switch (node(rng)) {
        case 0: return "(" + a + ")+(" + b + ")";
        case 1: return "(" + a + ")-(" + b + ")";
        case 2: return "(" + a + ")*(" + b + ")";
        case 3: return "sin(" + a + ")";
        case 4: return "cos(" + a + ")";
        default: return "(" + a + ")^" + std::to_string(expo(rng));
    }
}

}  // namespace

TEST_CASE("parse and evaluate basics") {
    CHECK(eval("0.6*t", 5.0) == Catch::Approx(3.0).epsilon(1e-15));
    CHECK(Expr::parse("0.6*t") == Expr::parse(" 0.6 * t "));
    CHECK_THAT(eval("0.5*c*sin(t/2)", M_PI), Catch::Matchers::WithinRel(0.5, 1e-15));
    CHECK(eval("2^3^2", 0.0) == 512.0);  // right-associative
    CHECK(eval("c*t", 2.0) == 2.0);
    CHECK_THAT(eval("exp(0)*pi", 17.0), Catch::Matchers::WithinRel(M_PI, 1e-15));
    CHECK(eval("-t^2", 3.0) == -9.0);  // ^ binds tighter than unary minus
    CHECK(eval("2*-3", 0.0) == -6.0);
    CHECK(eval("2^-2", 0.0) == 0.25);
    CHECK(eval("1-2-3", 0.0) == -4.0);  // left-associative
}

TEST_CASE("evaluation domain errors carry the sub-expression and t") {
    CHECK_THROWS_AS(eval("sqrt(t-5)", 1.0), EvalError);
    CHECK_THROWS_AS(eval("1/(t-2)", 2.0), EvalError);
    CHECK_THROWS_AS(eval("exp(t)", 1000.0), EvalError);
    try {
        eval("sqrt(t-5)", 1.0);
        FAIL("expected EvalError");
    } catch (const EvalError& e) {
        CHECK(e.subexpression == "sqrt(t-5)");
        CHECK(e.at == 1.0);
    }
}

TEST_CASE("structural differentiation") {
    CHECK(Expr::parse("0.6*t").derivative().str() == "0.6");
    CHECK(Expr::parse("sin(t)").derivative().evaluate(0.0, nat) == 1.0);
    CHECK_THAT(Expr::parse("t^3+2*t").derivative().evaluate(2.0, nat),
               Catch::Matchers::WithinRel(14.0, 1e-14));
    CHECK(Expr::parse("c*pi+4").derivative().str() == "0");
    CHECK_THAT(Expr::parse("sqrt(t)").derivative().evaluate(4.0, nat),
               Catch::Matchers::WithinRel(0.25, 1e-14));
    CHECK_THAT(Expr::parse("tanh(t)").derivative().evaluate(0.0, nat),
               Catch::Matchers::WithinRel(1.0, 1e-14));
}

TEST_CASE("parse errors are positioned and typed") {
    auto expect_parse_error = [](const std::string& text) {
        try {
            Expr::parse(text);
            FAIL("expected ParseError for: " << text);
        } catch (const ParseError&) {
            SUCCEED();
        }
    };
    expect_parse_error("");
    expect_parse_error("2t");      // no implicit multiplication
    expect_parse_error("sin(");
    expect_parse_error("sin 2");
    expect_parse_error("foo(t)");
    expect_parse_error("t^t");     // exponent must be constant
    expect_parse_error("2^c");
    expect_parse_error("(t");
    expect_parse_error("t+");
    expect_parse_error("1..2");
    expect_parse_error("t $ 2");
    expect_parse_error("t**2");

    try {
        Expr::parse("2t");
    } catch (const ParseError& e) {
        CHECK(e.position == 1);
    }
    try {
        Expr::parse("foo(t)");
    } catch (const ParseError& e) {
        CHECK(e.position == 0);
        CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }
}

TEST_CASE("print round-trip is the identity on parsed trees") {
    std::mt19937 rng(991);
    std::uniform_int_distribution<int> depth(0, 4);
    for (int i = 0; i < 200; ++i) {
        const std::string source = random_expression(rng, depth(rng));
        const Expr once = Expr::parse(source);
        const Expr twice = Expr::parse(once.str());
        INFO("source: " << source << "  printed: " << once.str());
        CHECK(once == twice);
        CHECK(once.str() == twice.str());
    }
}

TEST_CASE("derivative matches central finite differences") {
    std::mt19937 rng(2718);
    std::uniform_int_distribution<int> depth(1, 3);
    std::uniform_real_distribution<double> ts(-2.0, 2.0);
    const double h = 1e-5;
    int checked = 0;
    for (int i = 0; i < 50; ++i) {
        const Expr e = Expr::parse(random_smooth_expression(rng, depth(rng)));
        const Expr d = e.derivative();
        for (int j = 0; j < 10; ++j) {
            const double t = ts(rng);
            const double exact = d.evaluate(t, nat);
            if (std::abs(exact) < 1e-2) continue;  // relative error needs a signal
            const double fd = (e.evaluate(t + h, nat) - e.evaluate(t - h, nat)) / (2.0 * h);
            INFO("expr: " << e.str() << " at t=" << t);
            CHECK_THAT(fd, Catch::Matchers::WithinRel(exact, 1e-6));
            ++checked;
        }
    }
    CHECK(checked > 200);  // the guard must not hollow out the property
}
