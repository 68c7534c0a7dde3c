#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tw/expr.hpp"

using tw::Expr;
using tw::parse_expression;

TEST_CASE("numbers, variable and arithmetic") {
    CHECK(parse_expression("2").eval(0.3) == doctest::Approx(2.0));
    CHECK(parse_expression("phi").eval(0.3) == doctest::Approx(0.3));
    CHECK(parse_expression("1+2*3").eval(0.0) == doctest::Approx(7.0));
    CHECK(parse_expression("(1+2)*3").eval(0.0) == doctest::Approx(9.0));
    CHECK(parse_expression("1-2-3").eval(0.0) == doctest::Approx(-4.0));
    CHECK(parse_expression("8/4/2").eval(0.0) == doctest::Approx(1.0));
    CHECK(parse_expression("-phi^2").eval(2.0) == doctest::Approx(-4.0));
    CHECK(parse_expression("2*phi^3-phi").eval(0.5) ==
          doctest::Approx(2 * 0.125 - 0.5));
    CHECK(parse_expression("1e-3*phi").eval(2.0) == doctest::Approx(2e-3));
    CHECK(parse_expression("4/27*(2/3-phi)-1/81").eval(1.0) ==
          doctest::Approx(-5.0 / 81.0));
}

TEST_CASE("fractional powers and abs") {
    CHECK(parse_expression("phi^0.5").eval(0.25) == doctest::Approx(0.5));
    CHECK(parse_expression("abs(phi-0.5)").eval(0.2) == doctest::Approx(0.3));
    CHECK(parse_expression("abs(phi-0.5)^0.75").eval(0.2) ==
          doctest::Approx(std::pow(0.3, 0.75)));
    // negative base with a fractional exponent cannot be evaluated
    CHECK_THROWS_AS(parse_expression("phi^0.5").eval(-1.0), tw::EvalError);
    CHECK(!parse_expression("phi^0.5").try_eval(-1.0).has_value());
    // integer exponents are fine on negative bases
    CHECK(parse_expression("phi^3").eval(-2.0) == doctest::Approx(-8.0));
    CHECK_THROWS_AS(parse_expression("1/phi").eval(0.0), tw::EvalError);
}

TEST_CASE("parse errors carry a position") {
    CHECK_THROWS_AS(parse_expression("2*"), tw::ParseError);
    CHECK_THROWS_AS(parse_expression("phj"), tw::ParseError);
    CHECK_THROWS_AS(parse_expression("(1+2"), tw::ParseError);
    CHECK_THROWS_AS(parse_expression(""), tw::ParseError);
    CHECK_THROWS_AS(parse_expression("phi^phi"), tw::ParseError);
    try {
        parse_expression("1+*2");
    } catch (const tw::ParseError& e) {
        CHECK(e.pos == 2);
    }
}

TEST_CASE("symbolic derivative matches finite differences") {
    const char* cases[] = {
        "phi^2*(1-phi)",
        "-phi^3+1.1*phi^2-0.3*phi",
        "phi^0.75*(1/3-phi)",
        "(0.6-phi)*phi*(1-phi)*(phi-0.3)",
        "abs(phi-0.5)^1.5*(1-phi)",
    };
    for (const char* src : cases) {
        Expr f = parse_expression(src);
        Expr df = f.derivative();
        for (double x : {0.1, 0.3, 0.62, 0.9}) {
            double h = 1e-6;
            double fd = (f.eval(x + h) - f.eval(x - h)) / (2 * h);
            CHECK(df.eval(x) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("derivative of abs errors at the kink only") {
    Expr df = parse_expression("abs(phi-0.5)").derivative();
    CHECK(df.eval(0.7) == doctest::Approx(1.0));
    CHECK(df.eval(0.2) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(df.eval(0.5), tw::EvalError);
}
