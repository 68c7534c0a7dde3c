#pragma once

#include <string>

#include "tw/coeffs.hpp"

namespace tw {

// Growth of the reaction term at its interior zero: one-sided Lipschitz
// bounds and the lower-bound exponent controlling whether the equilibrium
// gamma is reached at finite time by the profile (tau < 1).
GrowthFlags check_g_growth(const CoefficientSet& cs);

enum class Verdict { Holds, Fails, Undecidable };

struct ConditionReport {
    Verdict verdict = Verdict::Undecidable;
    double lhs = 0.0, rhs = 0.0;  // the two sides of the inequality tested
    std::string detail;
};

// Necessary condition for a sharp wavefront reaching 0, valid when the
// convection flux is convex: the integral of D*g over (0, alpha) must be
// positive.
ConditionReport check_necessary_convex(const CoefficientSet& cs);

// Sufficient condition (convex flux): the same integral dominates an
// explicit expression built from sup difference quotients of D*g.
ConditionReport check_sufficient_convex(const CoefficientSet& cs);

// Sufficient conditions for strictly concave flux; the inequality tested
// depends on the ordering of alpha and gamma.
ConditionReport check_sufficient_concave(const CoefficientSet& cs);

}  // namespace tw
