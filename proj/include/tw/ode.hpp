#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace tw {

// Adaptive Dormand-Prince 5(4) for a scalar ODE y' = f(x, y), integrating
// toward x1 in either direction. Tailored to the shooting problems here:
// the solution must stay strictly negative, so a step that would carry y
// across zero is halved, and once |y| drops below zero_floor the run stops
// and reports where.

struct OdeOptions {
    double reltol = 1e-9;
    double abstol = 1e-13;
    double max_step = 0.0;      // 0 = no cap
    double zero_floor = 1e-12;  // |y| below this counts as having hit zero
    std::size_t max_steps = 4'000'000;
};

enum class OdeStatus { ReachedEnd, HitZero, StepUnderflow, StepBudget };

struct OdeOutcome {
    OdeStatus status = OdeStatus::ReachedEnd;
    double x = 0.0;  // where integration stopped
    double y = 0.0;
};

template <class Rhs, class Observer>
OdeOutcome integrate_scalar(Rhs&& f, double x0, double y0, double x1,
                            const OdeOptions& opt, Observer&& observe) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                            e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeOutcome out;
    double dir = x1 >= x0 ? 1.0 : -1.0;
    double span = std::abs(x1 - x0);
    if (span == 0.0) {
        out.x = x0;
        out.y = y0;
        return out;
    }
    double x = x0, y = y0;
    double h = std::min(span / 100.0, opt.max_step > 0.0 ? opt.max_step : span);
    double k1 = f(x, y);
    observe(x, y, k1);

    for (std::size_t steps = 0; steps < opt.max_steps; ++steps) {
        if (dir * (x1 - x) <= 0.0) {
            out.status = OdeStatus::ReachedEnd;
            out.x = x;
            out.y = y;
            return out;
        }
        h = std::min(h, std::abs(x1 - x));
        if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
        double hs = dir * h;

        double k2 = f(x + c2 * hs, y + hs * a21 * k1);
        double k3 = f(x + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        double k4 = f(x + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        double k5 = f(x + c5 * hs,
                      y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        double k6 = f(x + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 +
                                        a64 * k4 + a65 * k5));
        double ynew =
            y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        double k7 = f(x + hs, ynew);
        double err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                           e7 * k7);
        double sc = opt.abstol +
                    opt.reltol * std::max(std::abs(y), std::abs(ynew));
        double ratio = std::abs(err) / sc;
        bool accept = ratio <= 1.0 && std::isfinite(ynew);

        // Keep the trajectory on the negative side of zero.
        if (accept && ynew > 0.0) {
            if (h <= 1e-14 * span) {
                out.status = OdeStatus::HitZero;
                out.x = x + hs;
                out.y = 0.0;
                return out;
            }
            h *= 0.5;
            continue;
        }

        if (accept) {
            x += hs;
            y = ynew;
            k1 = k7;
            observe(x, y, k1);
            if (-y < opt.zero_floor) {
                out.status = OdeStatus::HitZero;
                out.x = x;
                out.y = y;
                return out;
            }
        }
        double fac = 0.9 * std::pow(std::max(ratio, 1e-10), -0.2);
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        if (h < 1e-16 * span) {
            out.status = OdeStatus::StepUnderflow;
            out.x = x;
            out.y = y;
            return out;
        }
    }
    out.status = OdeStatus::StepBudget;
    out.x = x;
    out.y = y;
    return out;
}

}  // namespace tw
