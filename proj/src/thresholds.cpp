#include "tw/thresholds.hpp"

#include <cmath>
#include <limits>

namespace tw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sharper upper bound for c*: the sup of the flux difference quotient plus
// twice the square root of the sup of the averaged quotient
// (1/(x-sigma1)) * integral of q(t)/(t-sigma1) over [sigma1, x].
Bound sharp_upper_bound(const Fn& q, const Fn& h, double s1, double s2,
                        int grid) {
    double L = s2 - s1;
    int n = std::max(grid, 512);
    double step = L / n;
    double acc_h = 0.0, acc_q = 0.0;
    double prev_h, prev_q;
    auto ev = [&](const Fn& F, double x) {
        try {
            return F(x);
        } catch (const EvalError&) {
            return F(x + 1e-12 * L);
        }
    };
    prev_h = ev(h, s1);
    // q(t)/(t-s1) tends to the one-sided derivative of q at s1 (or
    // diverges); seeding the trapezoid with 0 would undercut both the
    // first panel and the supremum, which is often attained at s1 itself.
    double d0 = 1e-9 * L;
    prev_q = ev(q, s1 + d0) / d0;
    double sup_mean_h = prev_h, sup_mean_q = prev_q;
    for (int i = 1; i <= n; ++i) {
        double x = s1 + step * i;
        double hv = ev(h, x);
        double qv = ev(q, x) / (x - s1);
        acc_h += 0.5 * (prev_h + hv) * step;
        acc_q += 0.5 * (prev_q + qv) * step;
        prev_h = hv;
        prev_q = qv;
        sup_mean_h = std::max(sup_mean_h, acc_h / (x - s1));
        sup_mean_q = std::max(sup_mean_q, acc_q / (x - s1));
    }
    if (!std::isfinite(sup_mean_q) || sup_mean_q > 1e12) return {kInf, false};
    return {sup_mean_h + 2.0 * std::sqrt(std::max(0.0, sup_mean_q)), true};
}

// c* of a canonical problem together with its bounds, optionally negated
// (the thresholds defined through reflected problems carry a minus sign).
Threshold star_threshold(const Fn& q, const Fn& h, double s1, double s2,
                         bool negate, const SolverOptions& opt) {
    Threshold t;
    t.present = true;
    CStar cs = compute_cstar(q, h, s1, s2, opt);
    Bound lower{cs.lower, true};
    Bound upper{cs.upper, cs.upper_finite};
    Bound sharp = cs.plus_infinite ? Bound{kInf, false}
                                   : sharp_upper_bound(q, h, s1, s2, opt.grid);
    if (cs.plus_infinite) {
        t.finite = false;
        if (negate) {
            t.minus_infinite = true;
            t.value = -kInf;
        } else {
            t.value = kInf;
        }
    } else {
        t.value = negate ? -cs.value : cs.value;
    }
    if (!negate) {
        t.lower = lower;
        t.upper = upper;
        t.sharp = sharp;
        t.sharp_is_upper = true;
    } else {
        t.lower = upper.finite ? Bound{-upper.value, true} : Bound{-kInf, false};
        t.upper = Bound{-lower.value, lower.finite};
        t.sharp = sharp.finite ? Bound{-sharp.value, true} : Bound{-kInf, false};
        t.sharp_is_upper = false;
    }
    return t;
}

}  // namespace

ThresholdSet compute_named_thresholds(const CoefficientSet& cs,
                                      const SolverOptions& opt) {
    ThresholdSet ts;
    Fn q = [&cs](double x) { return cs.q(x); };
    Fn h = [&cs](double x) { return cs.h(x); };
    Fn q_t = transform(q, TransformKind::Tilde);
    Fn h_t = transform(h, TransformKind::Tilde);
    Fn h_b = transform(h, TransformKind::Bar);
    Fn h_neg = [h](double x) { return -h(x); };

    double a_bar = 1.0 - cs.alpha, g_bar = 1.0 - cs.gamma;

    ts.c11 = star_threshold(q_t, h_t, std::max(a_bar, g_bar), 1.0, true, opt);
    ts.c32 = star_threshold(q_t, h_b, 0.0, std::min(a_bar, g_bar), false, opt);
    if (cs.alpha > cs.gamma)
        ts.c12 = star_threshold(q, h, cs.gamma, cs.alpha, false, opt);
    if (cs.alpha < cs.gamma)
        ts.c31 = star_threshold(q, h_neg, cs.alpha, cs.gamma, true, opt);

    auto hv = [&](double x) {
        auto v = cs.h.try_eval(x);
        if (v) return *v;
        v = cs.h.try_eval(x - 1e-12);
        return v ? *v : cs.h(x + 1e-12);
    };
    ts.h_alpha = hv(cs.alpha);
    ts.h_one = hv(1.0);
    return ts;
}

}  // namespace tw
