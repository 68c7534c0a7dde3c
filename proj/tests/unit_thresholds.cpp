#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tw/problem_io.hpp"
#include "tw/thresholds.hpp"

#ifndef PROBLEMS_DIR
#define PROBLEMS_DIR "problems"
#endif

using namespace tw;

static ProblemFile load(const char* name) {
    return load_problem_file(std::string(PROBLEMS_DIR) + "/" + name);
}

static void check_sandwich(const Threshold& t) {
    if (!t.present || !t.finite) return;
    if (t.lower.finite) CHECK(t.value >= t.lower.value - 1e-5);
    if (t.upper.finite) CHECK(t.value <= t.upper.value + 1e-5);
    if (t.sharp.finite) {
        if (t.sharp_is_upper)
            CHECK(t.value <= t.sharp.value + 1e-5);
        else
            CHECK(t.value >= t.sharp.value - 1e-5);
    }
}

TEST_CASE("cubic convection, diffusivity change above the reaction zero") {
    ProblemFile pf = load("cubic_convection_agtg.json");
    ThresholdSet ts = compute_named_thresholds(pf.cs, pf.opt);
    CHECK(ts.c11.present);
    CHECK(ts.c12.present);
    CHECK(!ts.c31.present);
    CHECK(ts.c32.present);
    // frozen from independent runs of the shooting bracket at tight tolerance
    CHECK(ts.c11.value == doctest::Approx(-0.41335).epsilon(2e-3));
    CHECK(ts.c12.value == doctest::Approx(0.59200).epsilon(2e-3));
    CHECK(ts.c32.value == doctest::Approx(-0.04170).epsilon(2e-3));
    CHECK(ts.h_alpha == doctest::Approx(-0.06));
    CHECK(ts.h_one == doctest::Approx(-1.1));
    for (const Threshold* t : {&ts.c11, &ts.c12, &ts.c32}) check_sandwich(*t);
}

TEST_CASE("cubic convection, diffusivity change below the reaction zero") {
    ProblemFile pf = load("cubic_convection_altg.json");
    ThresholdSet ts = compute_named_thresholds(pf.cs, pf.opt);
    CHECK(ts.c11.present);
    CHECK(!ts.c12.present);
    CHECK(ts.c31.present);
    CHECK(ts.c32.present);
    CHECK(ts.c11.value == doctest::Approx(0.0080042).epsilon(2e-3));
    CHECK(ts.c31.value == doctest::Approx(0.0080042).epsilon(2e-3));
    CHECK(ts.c32.value == doctest::Approx(-0.04170).epsilon(2e-3));
    for (const Threshold* t : {&ts.c11, &ts.c31, &ts.c32}) check_sandwich(*t);
}

TEST_CASE("symmetric coefficients give opposite outer thresholds") {
    ProblemFile pf = load("symmetric_quartic_plateau.json");
    ThresholdSet ts = compute_named_thresholds(pf.cs, pf.opt);
    CHECK(ts.c11.present);
    CHECK(!ts.c12.present);
    CHECK(!ts.c31.present);
    CHECK(ts.c32.present);
    CHECK(std::abs(ts.c11.value) < 1e-3);
    CHECK(std::abs(ts.c32.value) < 1e-3);
    CHECK(ts.c11.value == doctest::Approx(-ts.c32.value));
}

TEST_CASE("sublinear reaction example has all three thresholds at zero") {
    ProblemFile pf = load("asymmetric_sublinear.json");
    ThresholdSet ts = compute_named_thresholds(pf.cs, pf.opt);
    CHECK(ts.c11.present);
    CHECK(ts.c31.present);
    CHECK(ts.c32.present);
    CHECK(std::abs(ts.c11.value) < 1e-3);
    CHECK(std::abs(ts.c31.value) < 1e-3);
    CHECK(std::abs(ts.c32.value) < 1e-3);
    for (const Threshold* t : {&ts.c11, &ts.c31, &ts.c32}) check_sandwich(*t);
}
