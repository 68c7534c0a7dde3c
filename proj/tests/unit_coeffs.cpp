#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tw/coeffs.hpp"
#include "tw/quadrature.hpp"

using namespace tw;

static Piecewise pw(const std::string& src) {
    return Piecewise(parse_expression(src));
}

TEST_CASE("piecewise evaluation and piece ownership") {
    std::vector<Piecewise::Piece> pieces = {
        {0.0, 0.5, parse_expression("phi")},
        {0.5, 1.0, parse_expression("1-phi")},
    };
    Piecewise p(pieces);
    CHECK(p(0.2) == doctest::Approx(0.2));
    CHECK(p(0.8) == doctest::Approx(0.2));
    // a boundary point belongs to the piece on its left
    CHECK(p(0.5) == doctest::Approx(0.5));
    CHECK(p(0.0) == doctest::Approx(0.0));
    CHECK(p(1.0) == doctest::Approx(0.0));
    Piecewise dp = p.derivative();
    CHECK(dp(0.2) == doctest::Approx(1.0));
    CHECK(dp(0.8) == doctest::Approx(-1.0));
}

TEST_CASE("coefficient sets derive h from f and validate signs") {
    auto cs = make_coefficient_set(
        Piecewise(parse_expression("-phi^3+1.1*phi^2-0.3*phi")),
        pw("0.6-phi"), pw("phi*(1-phi)*(phi-0.3)"), std::nullopt, 0.6, 0.3);
    CHECK(cs.h(0.5) == doctest::Approx(-3 * 0.25 + 2.2 * 0.5 - 0.3));
    CHECK(cs.Ddot(0.5) == doctest::Approx(-1.0));
    CHECK(cs.q(0.5) == doctest::Approx((0.6 - 0.5) * 0.5 * 0.5 * 0.2));
    CHECK(cs.validate().ok());
    // flux is the antiderivative of h, vanishing at 0
    CHECK(cs.flux(0.5) == doctest::Approx(-std::pow(0.5, 3) +
                                          1.1 * 0.25 - 0.15));
}

TEST_CASE("validation rejects a diffusivity with the wrong sign change") {
    auto cs = make_coefficient_set(std::nullopt, pw("phi-0.6"),
                                   pw("phi*(1-phi)*(phi-0.3)"),
                                   Piecewise(parse_expression("0")), 0.6, 0.3);
    CHECK(!cs.validate().ok());
}

TEST_CASE("validation rejects a reaction that misses its interior zero") {
    auto cs = make_coefficient_set(std::nullopt, pw("0.6-phi"),
                                   pw("phi*(1-phi)"),
                                   Piecewise(parse_expression("0")), 0.6, 0.3);
    CHECK(!cs.validate().ok());
}

TEST_CASE("diffusivity need not vanish at the outer equilibria") {
    std::vector<Piecewise::Piece> dpieces = {
        {0.0, 1.0 / 3, parse_expression("(phi-1/3)^4")},
        {1.0 / 3, 2.0 / 3, parse_expression("-(phi-1/3)^4")},
        {2.0 / 3, 1.0, parse_expression("4/27*(2/3-phi)-1/81")},
    };
    auto cs = make_coefficient_set(
        std::nullopt, Piecewise(dpieces),
        pw("phi*(1-phi)*(phi-2/3)"), Piecewise(parse_expression("0")),
        1.0 / 3, 2.0 / 3);
    CHECK(cs.D(1.0) != 0.0);
    CHECK(cs.validate().ok());
}

TEST_CASE("difference quotient sup on a concave function") {
    // F(x) = x(1-x), x0 = 0: quotient is 1-x, sup approaches 1
    Fn F = [](double x) { return x * (1 - x); };
    SupResult s = difference_quotient_sup(F, 0.0, 0.0, 0.0, 1.0, 2048);
    CHECK(!s.infinite);
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("difference quotient sup detects an unbounded quotient") {
    Fn F = [](double x) { return std::sqrt(x); };
    SupResult s = difference_quotient_sup(F, 0.0, 0.0, 0.0, 1.0, 2048);
    CHECK(s.infinite);
}

TEST_CASE("one-sided Dini derivatives") {
    Fn F = [](double x) { return std::abs(x - 0.5); };
    DiniResult r = dini_estimate(F, 0.5, Side::Right, DiniKind::Upper);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-3));
    DiniResult l = dini_estimate(F, 0.5, Side::Left, DiniKind::Upper);
    CHECK(l.value == doctest::Approx(-1.0).epsilon(1e-3));
    Fn S = [](double x) { return std::sqrt(std::abs(x - 0.5)); };
    DiniResult ri = dini_estimate(S, 0.5, Side::Right, DiniKind::Upper);
    CHECK(ri.plus_infinite);
}

TEST_CASE("power fit recovers amplitude and exponent") {
    Fn F = [](double x) { return 3.0 * std::pow(x - 0.25, 1.5); };
    PowerFit fit = fit_power(F, 0.25, Side::Right, 1e-8, 1e-2);
    CHECK(fit.ok);
    CHECK(fit.A == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(fit.r == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(fit.residual < 1e-6);
}

TEST_CASE("quadrature: smooth, kinked and improper integrands") {
    CHECK(gauss7([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3));
    CHECK(adaptive_quad([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0,
                        1e-12) ==
          doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-10));
    // integral of 1/sqrt(x) over (0,1] converges to 2
    TailResult t = improper_to_endpoint(
        [](double x) { return 1.0 / std::sqrt(x); }, 1.0, 0.0);
    CHECK(t.finite);
    CHECK(t.value == doctest::Approx(-2.0).epsilon(1e-4));
    // integral of 1/x diverges
    TailResult d = improper_to_endpoint(
        [](double x) { return 1.0 / x; }, 1.0, 0.0);
    CHECK(!d.finite);
}
