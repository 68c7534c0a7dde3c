#pragma once

#include <cmath>
#include <functional>

namespace tw {

// 7-point Gauss-Legendre on [a,b].
template <class F>
double gauss7(F&& f, double a, double b) {
    static constexpr double xs[7] = {
        -0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
        0.0,
        0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
    static constexpr double ws[7] = {
        0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
        0.4179591836734694,
        0.3818300505051189, 0.2797053914892766, 0.1294849661688697};
    double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 7; ++i) acc += ws[i] * f(c + hw * xs[i]);
    return acc * hw;
}

namespace detail {
template <class F>
double adapt(F& f, double a, double b, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double left = gauss7(f, a, m), right = gauss7(f, m, b);
    if (depth <= 0 || std::abs(left + right - whole) <= tol)
        return left + right;
    return adapt(f, a, m, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Gauss quadrature; fine for integrands with isolated kinks.
template <class F>
double adaptive_quad(F&& f, double a, double b, double tol = 1e-10,
                     int max_depth = 40) {
    if (a == b) return 0.0;
    return detail::adapt(f, a, b, gauss7(f, a, b), tol, max_depth);
}

// Improper integral of f over the one-sided neighbourhood of a singular
// endpoint e, starting from the regular point a. The interval is split
// into geometric slices shrinking toward e; convergence is decided by a
// ratio test on the slice integrals. Returns the value of the integral
// from a up to e (tail extrapolated geometrically) and whether it is
// finite.
struct TailResult {
    double value = 0.0;
    bool finite = true;
};

template <class F>
TailResult improper_to_endpoint(F&& f, double a, double e,
                                double ratio = 0.5, int max_slices = 160,
                                double floor_frac = 1e-13,
                                double blow_up = 1e6) {
    TailResult res;
    double gap = e - a;  // signed
    double prev_mag = 0.0;
    int decaying = 0;
    double t_prev = a;
    for (int k = 1; k <= max_slices; ++k) {
        double t = e - gap * std::pow(ratio, k);
        double slice = gauss7(f, t_prev, t);
        res.value += slice;
        double mag = std::abs(slice);
        if (k > 1) {
            if (mag < 0.9 * prev_mag) ++decaying; else decaying = 0;
            if (decaying >= 6) {
                // Convergent: extrapolate the remaining tail geometrically.
                double r = prev_mag > 0.0 ? mag / prev_mag : 0.0;
                if (r < 1.0 && mag > 0.0)
                    res.value += (slice / mag) * mag * r / (1.0 - r);
                return res;
            }
        }
        if (std::abs(res.value) > blow_up) {
            res.finite = false;
            return res;
        }
        prev_mag = mag;
        t_prev = t;
        if (std::abs(e - t) < floor_frac * std::abs(gap)) break;
    }
    // The slices never settled into decay before reaching the resolution
    // floor; unless they became negligible the integral diverges.
    res.finite = prev_mag < 1e-12 * (1.0 + std::abs(res.value));
    return res;
}

}  // namespace tw
