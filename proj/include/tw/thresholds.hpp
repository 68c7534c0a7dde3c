#pragma once

#include "tw/coeffs.hpp"
#include "tw/singular_ode.hpp"

namespace tw {

struct Bound {
    double value = 0.0;
    bool finite = false;
};

// One of the four named critical speeds, with its a-priori bracket and,
// when available, the sharper integral-averaged bound.
struct Threshold {
    bool present = false;   // whether this threshold exists for the case
    double value = 0.0;
    bool finite = true;
    bool minus_infinite = false;  // value is -inf (finite=false then too)
    Bound lower, upper;
    Bound sharp;            // sharper one-sided bound
    bool sharp_is_upper = true;
};

struct ThresholdSet {
    Threshold c11, c12, c31, c32;
    double h_alpha = 0.0, h_one = 0.0;
};

ThresholdSet compute_named_thresholds(const CoefficientSet& cs,
                                      const SolverOptions& opt = {});

}  // namespace tw
