#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tw/problem_io.hpp"
#include "tw/profile.hpp"

#ifndef PROBLEMS_DIR
#define PROBLEMS_DIR "problems"
#endif

using namespace tw;

static ProblemFile load(const char* name) {
    return load_problem_file(std::string(PROBLEMS_DIR) + "/" + name);
}

// Densely sample a closed-form z into a ZCurve, with graded spacing
// toward the endpoints so the interpolation dominates the power model.
static ZCurve curve_from(const Fn& f, double s1, double s2, double dl,
                         double dr) {
    ZCurve zc;
    zc.sigma1 = s1;
    zc.sigma2 = s2;
    double L = s2 - s1;
    for (double d = 0.25 * L; d > 1e-11 * L; d *= 0.9) zc.phi.push_back(s1 + d);
    for (int i = 1; i < 800; ++i)
        zc.phi.push_back(s1 + 0.25 * L + 0.5 * L * i / 800);
    for (double d = 0.25 * L; d > 1e-11 * L; d *= 0.9) zc.phi.push_back(s2 - d);
    std::sort(zc.phi.begin(), zc.phi.end());
    zc.phi.erase(std::unique(zc.phi.begin(), zc.phi.end()), zc.phi.end());
    for (double x : zc.phi) zc.z.push_back(f(x));
    zc.zdot_left = dl;
    zc.zdot_right = dr;
    return zc;
}

TEST_CASE("cubic profile matches the logistic closed form") {
    ProblemFile pf = load("cubic_convection_agtg.json");
    SpeedReport rep = admissible_speeds(pf.cs, pf.opt);
    GluedZ gz = solve_z_for_speed(pf.cs, rep, rep.J.lo, std::nullopt, pf.opt);
    ProfileCurve pc = reconstruct_profile(pf.cs, gz, 0.5, pf.opt);
    double worst = 0.0;
    for (double xi = -8.0; xi <= 8.0; xi += 0.05) {
        double expect = 1.0 / (std::exp(xi) + 1.0);
        worst = std::max(worst, std::abs(pc.eval_phi(xi) - expect));
    }
    CHECK(worst < 5e-3);
    // monotone non-increasing samples
    for (std::size_t i = 1; i < pc.samples.size(); ++i) {
        CHECK(pc.samples[i].xi >= pc.samples[i - 1].xi);
        CHECK(pc.samples[i].phi <= pc.samples[i - 1].phi + 1e-12);
    }
    ResidualReport rr = residual(pc, pf.cs, rep.J.lo);
    CHECK(rr.interior_max < 1e-5);
}

TEST_CASE("junction classification on the cubic examples") {
    ProblemFile pf = load("cubic_convection_agtg.json");
    ThresholdSet ts = compute_named_thresholds(pf.cs, pf.opt);
    SharpnessClass sc = classify_at_alpha(pf.cs, ts, 0.0, pf.opt);
    CHECK(sc.kind == SharpnessClass::ClassicalNegative);
    CHECK(sc.left_slope == doctest::Approx(-0.24).epsilon(0.01));

    ProblemFile pf2 = load("cubic_convection_altg.json");
    ThresholdSet ts2 = compute_named_thresholds(pf2.cs, pf2.opt);
    SharpnessClass sc2 = classify_at_alpha(pf2.cs, ts2, 0.0, pf2.opt);
    CHECK(sc2.kind == SharpnessClass::ClassicalNegative);
    CHECK(sc2.left_slope == doctest::Approx(-0.21).epsilon(0.01));
}

TEST_CASE("plateau insertion at a vanishing-flux junction") {
    ProblemFile pf = load("symmetric_quartic_plateau.json");
    SpeedReport rep = admissible_speeds(pf.cs, pf.opt);
    GluedZ gz = solve_z_for_speed(pf.cs, rep, rep.J.lo, std::nullopt, pf.opt);
    ProfileCurve pc = reconstruct_profile(pf.cs, gz, std::nullopt, pf.opt);
    ProfileCurve wide = insert_plateau(pc, 1.0, 2.0);
    REQUIRE(wide.plateaus.size() == 1);
    CHECK(wide.plateaus[0].level == doctest::Approx(0.5));
    CHECK(wide.plateaus[0].xi_hi - wide.plateaus[0].xi_lo ==
          doctest::Approx(3.0));
    // the profile rests at the level across the plateau
    double mid = 0.5 * (wide.plateaus[0].xi_lo + wide.plateaus[0].xi_hi);
    CHECK(wide.eval_phi(mid) == doctest::Approx(0.5));
    CHECK_THROWS(insert_plateau(pc, -1.0, 0.0));
}

TEST_CASE("plateau rejected when the junction flux does not vanish") {
    ProblemFile pf = load("cubic_convection_agtg.json");
    SpeedReport rep = admissible_speeds(pf.cs, pf.opt);
    GluedZ gz = solve_z_for_speed(pf.cs, rep, rep.J.lo, std::nullopt, pf.opt);
    ProfileCurve pc = reconstruct_profile(pf.cs, gz, 0.5, pf.opt);
    CHECK_THROWS(insert_plateau(pc, 0.5, 0.5));
}

// Degenerate diffusivity vanishing only at 0, reaction not Lipschitz at
// its interior zero, with the closed form z = phi (1 - phi): the profile
// is 1 - e^xi / 2 and its slope where it crosses the reaction zero stays
// strictly negative, so no plateau can be inserted.
TEST_CASE("round trip through a profile with nonvanishing interior flux") {
    CoefficientSet cs;
    cs.D = Piecewise(parse_expression("-phi"));
    cs.g = Piecewise(parse_expression(
        "(phi-0.5)*(1-phi)/abs(phi-0.5)^0.5"));
    cs.h = Piecewise(parse_expression(
        "1-2*phi-(phi-0.5)/abs(phi-0.5)^0.5"));
    cs.Ddot = cs.D.derivative();
    cs.alpha = 0.0;
    cs.gamma = 0.5;

    GluedZ gz;
    gz.c = 0.0;
    gz.tag = CaseTag::AlphaLess;
    gz.alpha = 0.0;
    gz.gamma = 0.5;
    gz.z_gamma = 0.25;
    gz.lambda = 0.25 / cs.D(0.5);
    gz.pieces.push_back(
        curve_from([](double x) { return x * (1 - x); }, 0.0, 1.0, 1.0, -1.0));

    ProfileCurve p1 = reconstruct_profile(cs, gz, 0.5);
    GluedZ back = extract_z(p1, cs);
    ProfileCurve p2 = reconstruct_profile(cs, back, 0.5);
    double worst = 0.0;
    for (double xi = -5.0; xi <= std::log(2.0) - 0.1; xi += 0.01)
        worst = std::max(worst,
                         std::abs(p2.eval_phi(xi) - (1.0 - 0.5 * std::exp(xi))));
    CHECK(worst < 1e-3);

    const ProfileJunction* jg = p2.junction_at(0.5, true);
    REQUIRE(jg != nullptr);
    double slope = jg->flux / cs.D(0.5);
    CHECK(slope < 0.0);
    CHECK_THROWS(insert_plateau(p2, 0.5, 0.5));
}

// Steeper degenerate diffusivity with the closed form
// z = phi |phi - 0.5|^0.75 (1 - phi): the flux vanishes where the
// reaction changes sign, both one-sided reaching times are finite, and a
// plateau can be inserted there.
TEST_CASE("zero interior flux admits a plateau") {
    CoefficientSet cs;
    cs.D = Piecewise(parse_expression("-phi^2"));
    cs.g = Piecewise(parse_expression(
        "0.75*(phi-0.5)*(1-phi)^2/abs(phi-0.5)^0.5"));
    cs.h = Piecewise(parse_expression("(1-2*phi)*abs(phi-0.5)^0.75"));
    cs.Ddot = cs.D.derivative();
    cs.alpha = 0.0;
    cs.gamma = 0.5;

    auto zf = [](double x) {
        return x * std::pow(std::abs(x - 0.5), 0.75) * (1 - x);
    };
    GluedZ gz;
    gz.c = 0.0;
    gz.tag = CaseTag::AlphaLess;
    gz.alpha = 0.0;
    gz.gamma = 0.5;
    gz.z_gamma = 0.0;
    gz.lambda = 0.0;
    gz.pieces.push_back(curve_from(zf, 0.0, 0.5, 1.0, 0.0));
    gz.pieces.push_back(curve_from(zf, 0.5, 1.0, 0.0, -1.0));

    ProfileCurve p = reconstruct_profile(cs, gz, 0.25);
    const ProfileJunction* above = p.junction_at(0.5, true);
    const ProfileJunction* below = p.junction_at(0.5, false);
    REQUIRE(above != nullptr);
    REQUIRE(below != nullptr);
    CHECK(above->finite);
    CHECK(below->finite);
    CHECK(std::abs(above->flux) < 1e-9);

    ProfileCurve wide = insert_plateau(p, 0.7, 0.3);
    CHECK(wide.plateaus.size() == 1);
    double mid = 0.5 * (wide.plateaus[0].xi_lo + wide.plateaus[0].xi_hi);
    CHECK(wide.eval_phi(mid) == doctest::Approx(0.5));
}
