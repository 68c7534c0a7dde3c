#pragma once

#include <optional>
#include <vector>

#include "tw/conditions.hpp"
#include "tw/thresholds.hpp"

namespace tw {

enum class CaseTag { AlphaGreater, AlphaEqual, AlphaLess };
enum class Inclusion { Yes, No, Unknown };

// The set J of admissible wavefront speeds: empty, a single speed, or an
// interval with endpoint inclusion flags.
struct SpeedInterval {
    bool empty = true;
    bool singleton = false;
    double lo = 0.0, hi = 0.0;  // lo == hi for singletons
    Inclusion lo_inc = Inclusion::No, hi_inc = Inclusion::No;
    bool contains(double c, double tol) const {
        if (empty) return false;
        if (singleton) return std::abs(c - lo) <= tol;
        bool above = lo_inc == Inclusion::No ? c > lo + tol : c >= lo - tol;
        bool below = hi_inc == Inclusion::No ? c < hi - tol : c <= hi + tol;
        return above && below;
    }
};

struct SpeedReport {
    CaseTag tag = CaseTag::AlphaEqual;
    ThresholdSet thresholds;
    SpeedInterval J;
    GrowthFlags growth;
    // Representative family data for the alpha < gamma case.
    double beta_rep = 0.0, lambda_rep = 0.0, c_rep = 0.0;
    bool family_valid = false;
};

// The reduced solution z = D(phi) * phi' on (0,1) for an admissible speed,
// stored piecewise between consecutive zeros of z.
struct GluedZ {
    double c = 0.0;
    CaseTag tag = CaseTag::AlphaEqual;
    double alpha = 0.0, gamma = 0.0;
    std::vector<ZCurve> pieces;  // ascending in phi, true orientation
    double z_gamma = 0.0;        // value at gamma
    double lambda = 0.0;         // z(gamma)/D(gamma) when D(gamma) != 0

    double eval(double phi) const;
};

SpeedReport admissible_speeds(const CoefficientSet& cs,
                              const SolverOptions& opt = {});

// alpha > gamma only: the unique speed at which the negative branch
// entering from 0 meets the branch vanishing at alpha.
double solve_c1star(const CoefficientSet& cs, const ThresholdSet& ts,
                    const SolverOptions& opt = {});

// beta(c)/D(gamma): the steepest admissible junction slope parameter for
// alpha < gamma.
double lambda_critical(const CoefficientSet& cs, double c,
                       const SolverOptions& opt = {});

// Build the reduced solution for a speed in J. For alpha < gamma, lambda
// selects the family member (default: the critical one); lambda = 0 needs
// the integrability flag.
GluedZ solve_z_for_speed(const CoefficientSet& cs, const SpeedReport& rep,
                         double c, std::optional<double> lambda = std::nullopt,
                         const SolverOptions& opt = {});

}  // namespace tw
