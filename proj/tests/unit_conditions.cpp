#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tw/conditions.hpp"
#include "tw/problem_io.hpp"
#include "tw/quadrature.hpp"

#ifndef PROBLEMS_DIR
#define PROBLEMS_DIR "problems"
#endif

using namespace tw;

static ProblemFile load(const char* name) {
    return load_problem_file(std::string(PROBLEMS_DIR) + "/" + name);
}

static CoefficientSet convex_instance(double alpha, double gamma) {
    return make_coefficient_set(
        std::nullopt, Piecewise(parse_expression(
                          "(" + std::to_string(alpha) + "-phi)")),
        Piecewise(parse_expression("phi*(1-phi)*(phi-" +
                                   std::to_string(gamma) + ")")),
        Piecewise(parse_expression("0.2+0.5*phi")), alpha, gamma);
}

TEST_CASE("reaction growth at its interior zero") {
    // linear zero: one-sided Lipschitz, no integrable lower bound
    ProblemFile pf = load("cubic_convection_altg.json");
    GrowthFlags gf = check_g_growth(pf.cs);
    CHECK(gf.g_sublinear_left);
    CHECK(gf.g_sublinear_right);
    CHECK(!gf.integrability);
    CHECK(gf.tau == doctest::Approx(1.0).epsilon(5e-3));

    // square-root zero: not Lipschitz, integrable lower bound with tau 1/2
    ProblemFile pf2 = load("asymmetric_sublinear.json");
    GrowthFlags gf2 = check_g_growth(pf2.cs);
    CHECK(!gf2.g_sublinear_left);
    CHECK(!gf2.g_sublinear_right);
    CHECK(gf2.integrability);
    CHECK(gf2.tau == doctest::Approx(0.5).epsilon(5e-3));
    CHECK(gf2.L > 0.0);
}

TEST_CASE("necessary condition under a convex flux") {
    // alpha > gamma: the product D*g integrates to a positive value
    CoefficientSet good = convex_instance(0.6, 0.2);
    ConditionReport rep = check_necessary_convex(good);
    CHECK(rep.verdict == Verdict::Holds);
    double direct = adaptive_quad([&](double x) { return good.q(x); },
                                  0.0, good.alpha, 1e-12);
    CHECK(rep.lhs == doctest::Approx(direct).epsilon(1e-6));
    CHECK(direct > 0.0);

    // alpha < gamma: the integral is negative and the condition fails
    CoefficientSet bad = convex_instance(0.3, 0.6);
    CHECK(check_necessary_convex(bad).verdict == Verdict::Fails);
}

TEST_CASE("convexity is checked before applying the criteria") {
    // the cubic golden flux is strictly concave on part of the interval
    ProblemFile pf = load("cubic_convection_agtg.json");
    ConditionReport rep = check_necessary_convex(pf.cs);
    CHECK(rep.verdict == Verdict::Undecidable);
}

TEST_CASE("sufficient condition is stronger than the necessary one") {
    for (double a : {0.55, 0.65, 0.75}) {
        CoefficientSet cs = convex_instance(a, 0.25);
        ConditionReport suf = check_sufficient_convex(cs);
        if (suf.verdict == Verdict::Holds)
            CHECK(check_necessary_convex(cs).verdict == Verdict::Holds);
    }
}

TEST_CASE("concave flux criterion reports a verdict on concave data") {
    auto cs = make_coefficient_set(
        std::nullopt, Piecewise(parse_expression("0.6-phi")),
        Piecewise(parse_expression("phi*(1-phi)*(phi-0.3)")),
        Piecewise(parse_expression("0.3-0.5*phi")), 0.6, 0.3);
    ConditionReport rep = check_sufficient_concave(cs);
    CHECK(rep.verdict != Verdict::Undecidable);
}
