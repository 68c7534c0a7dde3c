#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tw/coeffs.hpp"

namespace tw {

// Canonical reduced problem on (sigma1, sigma2):
//     z'(phi) = h(phi) - c - q(phi)/z(phi),   z < 0,
// with q > 0 in the interior and q(sigma1) = q(sigma2) = 0.
struct SingularProblem {
    Fn q, h;
    double c = 0.0;
    double sigma1 = 0.0, sigma2 = 1.0;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A solution branch: samples of z on (sigma1, sigma2), plus one-sided
// endpoint data. Samples ascend in phi and stop a small margin short of
// each endpoint.
struct ZCurve {
    double sigma1 = 0.0, sigma2 = 0.0;
    std::vector<double> phi, z;
    double z_left = 0.0;   // limit value at sigma1 (0 when it vanishes)
    double z_right = 0.0;  // limit value at sigma2
    double zdot_left = 0.0, zdot_right = 0.0;  // one-sided slope estimates
    bool zdot_left_infinite = false, zdot_right_infinite = false;

    double eval(double x) const;  // interpolation + endpoint power model
};

struct SolverOptions {
    double reltol = 1e-9;
    double bisect_tol = 1e-6;
    int grid = 2048;
    double zero_scale = 0.0;  // if 0, computed as 1e-7 * sqrt(max q)
};

// Scale used to decide "z vanishes here".
double zero_tolerance(const Fn& q, double sigma1, double sigma2, int grid);

// The distinguished solution vanishing at sigma2, integrated backward from
// a seed built out of the local behaviour of q. Throws SolverError if the
// trajectory crosses zero well inside the interval.
ZCurve solve_zeta(const SingularProblem& p, const SolverOptions& opt = {});

// Cheap variant used inside bisections: only the value at sigma1 matters.
// Returns the value, with interior zero hits reported as 0.
double zeta_left_value(const SingularProblem& p, const SolverOptions& opt = {});

// Critical speed c* = sup{ c : zeta_c(sigma1) < 0 }, located by bisection
// between computable lower/upper bounds.
struct CStar {
    double value = 0.0;
    bool plus_infinite = false;  // upper bound for c* is unbounded
    double lower = 0.0, upper = 0.0;  // the a-priori bracket used
    bool upper_finite = true;
};
CStar compute_cstar(const Fn& q, const Fn& h, double sigma1, double sigma2,
                    const SolverOptions& opt = {});

// For c >= c*, solutions z_{c,s} with z(sigma2) = s < 0 vanish at sigma1
// exactly when s >= beta(c); beta is found by bisection on s.
double compute_beta(const Fn& q, const Fn& h, double c, double sigma1,
                    double sigma2, const SolverOptions& opt = {});

// A member of the z_{c,s} family: backward integration from (sigma2, s),
// s <= 0. Throws SolverError if it fails to stay negative or does not
// vanish at sigma1 within tolerance when require_left_zero is set.
ZCurve solve_family_member(const SingularProblem& p, double s,
                           bool require_left_zero,
                           const SolverOptions& opt = {});

// Roots of m^2 - (h_end - c) m + qdot_end = 0, the possible one-sided
// slopes of z at an endpoint where q vanishes. Returned as (m_minus,
// m_plus) with m_minus <= m_plus. Throws if the roots are not real.
std::pair<double, double> indicial_slopes(double qdot_end, double h_end,
                                          double c);

// Coordinate changes used to carry the four named threshold problems into
// canonical form: bar F(phi) = F(1-phi), tilde F(phi) = -F(1-phi).
enum class TransformKind { Identity, Bar, Tilde };
Fn transform(Fn F, TransformKind k);
double transform_point(double x, TransformKind k);

}  // namespace tw
