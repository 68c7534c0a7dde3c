#pragma once

#include <optional>
#include <vector>

#include "tw/speeds.hpp"

namespace tw {

struct ProfileSample {
    double xi, phi, dphi;
};

// Where a monotone piece of the profile meets one of the levels
// {0, alpha, gamma, 1}.
struct ProfileJunction {
    double level = 0.0;
    double xi = 0.0;
    bool finite = true;   // reached at a finite abscissa
    bool from_above = true;  // approached with phi decreasing into the level
    double flux = 0.0;    // D(phi)*phi' there, i.e. z at the level
};

struct PlateauRecord {
    double level = 0.0;
    double xi_lo = 0.0, xi_hi = 0.0;
};

struct SharpnessClass {
    enum Kind { ClassicalZero, ClassicalNegative, SharpInfinite, Corner };
    Kind kind = ClassicalZero;
    double location = 0.0;      // the phi level classified
    double left_slope = 0.0;    // phi' approaching from xi < xi_junction
    double right_slope = 0.0;   // phi' leaving toward xi > xi_junction
};

// A reconstructed wavefront: samples ascend in xi, phi descends from 1
// toward 0 (possibly pausing on plateaus).
struct ProfileCurve {
    double c = 0.0;
    double alpha = 0.0, gamma = 0.0;
    std::vector<ProfileSample> samples;
    std::vector<ProfileJunction> junctions;
    std::vector<PlateauRecord> plateaus;

    double eval_phi(double xi) const;
    const ProfileJunction* junction_at(double level, bool from_above) const;
};

// Integrates xi(phi) = integral of D/z over each monotone branch of z and
// glues the branches; anchored so that phi(0) = anchor (default
// (alpha+1)/2).
ProfileCurve reconstruct_profile(const CoefficientSet& cs, const GluedZ& z,
                                 std::optional<double> anchor = std::nullopt,
                                 const SolverOptions& opt = {});

// Widens the profile by a resting interval at the level gamma; valid only
// when the flux vanishes there and both reaching times are finite.
ProfileCurve insert_plateau(const ProfileCurve& p, double delta_left,
                            double delta_right);

// One-sided derivative classification at the level alpha.
SharpnessClass classify_at_alpha(const CoefficientSet& cs,
                                 const ThresholdSet& ts, double c,
                                 const SolverOptions& opt = {});

struct ResidualReport {
    double interior_max = 0.0;  // normalised strong-form residual
    double weak_max = 0.0;      // residual against smooth bump test functions
};
ResidualReport residual(const ProfileCurve& p, const CoefficientSet& cs,
                        double c);

// Recovers z = D(phi)*phi' from a profile, split at the junction levels;
// plateau samples are skipped.
GluedZ extract_z(const ProfileCurve& p, const CoefficientSet& cs);

}  // namespace tw
