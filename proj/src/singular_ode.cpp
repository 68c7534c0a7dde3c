#include "tw/singular_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tw/ode.hpp"
#include "tw/quadrature.hpp"

namespace tw {

namespace {

double clamp(double v, double lo, double hi) {
    return std::min(hi, std::max(lo, v));
}

// Evaluate an Fn that may fail at isolated points by nudging inward.
double eval_robust(const Fn& F, double x, double nudge) {
    try {
        return F(x);
    } catch (const EvalError&) {
        try {
            return F(x + nudge);
        } catch (const EvalError&) {
            return F(x - nudge);
        }
    }
}

struct Rhs {
    const Fn& q;
    const Fn& h;
    double c;
    double nudge;
    double operator()(double x, double z) const {
        return eval_robust(h, x, nudge) - c - eval_robust(q, x, nudge) / z;
    }
};

double max_q(const Fn& q, double s1, double s2, int grid) {
    double m = 0.0;
    for (int i = 1; i < grid; ++i) {
        double x = s1 + (s2 - s1) * i / grid;
        try {
            m = std::max(m, std::abs(q(x)));
        } catch (const EvalError&) {
        }
    }
    return m;
}

// Local behaviour q ~ A (sigma2 - phi)^r near the right endpoint, and the
// matching seed value for z a distance eps short of sigma2.
struct SeedInfo {
    double A = 0.0, r = 1.0;  // q ~ A s^r
    double p = 1.0;           // z ~ -k s^p
    double z0 = 0.0;          // seed value at sigma2 - eps
};

SeedInfo make_seed(const SingularProblem& pr, double eps) {
    double L = pr.sigma2 - pr.sigma1;
    SeedInfo s;
    PowerFit fit = fit_power(pr.q, pr.sigma2, Side::Left, 1e-6 * L, 1e-3 * L, 40);
    if (!fit.ok) throw SolverError("cannot resolve q near the right endpoint");
    s.A = fit.A;
    s.r = fit.r;

    // Integrating the equation from sigma2 and modelling z ~ -K d^m on the
    // last stretch gives a quadratic for the seed value,
    //   z0^2 = -Phi(eps) z0 + A eps^(r+1) / (r + 1 - m),
    // with Phi the integrated drift. Its negative root reproduces the
    // indicial slope when r ~ 1, the sublinear balance when r < 1, and both
    // the drift-dominated and integrated-drift regimes when r > 1. The
    // exponent m is fixed by a short self-consistency iteration.
    auto drift_int = [&](double e) {
        return gauss7(
            [&](double t) { return eval_robust(pr.h, t, 1e-12 * L) - pr.c; },
            pr.sigma2 - e, pr.sigma2);
    };
    double P1 = drift_int(eps), P2 = drift_int(0.5 * eps);
    double m = std::min(fit.r, 0.5 * (1.0 + fit.r));
    double z0 = -std::sqrt(fit.A) * std::pow(eps, 0.5 * (1.0 + fit.r));
    for (int it = 0; it < 40; ++it) {
        double denom = std::max(0.25, fit.r + 1.0 - m);
        auto root = [&](double e, double P) {
            double disc =
                P * P + 4.0 * fit.A * std::pow(e, fit.r + 1.0) / denom;
            return 0.5 * (-P - std::sqrt(disc));
        };
        double za = root(eps, P1), zb = root(0.5 * eps, P2);
        if (!(za < 0.0) || !(zb < 0.0)) break;
        z0 = za;
        double mn = std::log(za / zb) / std::log(2.0);
        if (!std::isfinite(mn)) break;
        mn = clamp(mn, 0.05, fit.r + 0.75);
        if (std::abs(mn - m) < 1e-4) { m = mn; break; }
        m = 0.5 * (m + mn);
    }
    s.p = m;
    s.z0 = z0;
    if (!(s.z0 < 0.0))
        throw SolverError("cannot seed the reduced equation at the endpoint");
    return s;
}

// Descending grid of sample points from sigma2-eps2 down to sigma1+margin,
// geometric near each endpoint and uniform across the middle. theta2 is
// chosen from the expected endpoint exponent so that centered differences
// of the samples resolve the residual to ~1e-6.
std::vector<double> sample_grid(double s1, double s2, double eps2,
                                double margin1, double p_right) {
    double L = s2 - s1;
    double theta2 = 0.05;
    if (p_right < 0.999) {
        double curv = std::max(0.01, (1.0 - p_right) * (2.0 - p_right));
        theta2 = clamp(std::sqrt(3e-6 / curv), 1e-3, 0.05);
    }
    double theta1 = 0.01;
    double edge = 0.05 * L;

    std::vector<double> xs;
    double d = std::max(eps2, 1e-9 * L);
    while (d < edge) {
        xs.push_back(s2 - d);
        d *= 1.0 + theta2;
    }
    double left_stop = s1 + edge;
    double right_stop = s2 - edge;
    int n_int = 1600;
    for (int i = 0; i <= n_int; ++i)
        xs.push_back(right_stop - (right_stop - left_stop) * i / n_int);
    d = edge;
    while (d > margin1) {
        d /= 1.0 + theta1;
        xs.push_back(s1 + d);
    }
    std::sort(xs.begin(), xs.end(), std::greater<double>());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [&](double a, double b) { return a - b < 1e-15 * L; }),
             xs.end());
    return xs;
}

// Shared backward integration with dense sampling down a forced grid.
// Starts at (x_start, z_start); fills the curve (ascending in phi).
// Returns false if the trajectory reached zero before coming within
// near_left_frac of sigma1 (an interior zero).
struct DenseResult {
    ZCurve curve;
    bool interior_zero = false;
    double zero_at = 0.0;
};

DenseResult integrate_dense(const SingularProblem& pr, double x_start,
                            double z_start, double p_right,
                            const SolverOptions& opt) {
    double L = pr.sigma2 - pr.sigma1;
    double margin1 = 1e-7 * L;
    Rhs rhs{pr.q, pr.h, pr.c, 1e-12 * L};
    OdeOptions oo;
    oo.reltol = opt.reltol;
    // The floor must sit well below the seed magnitude: a high-order
    // tangency at sigma2 starts the trajectory at a tiny |z|.
    oo.zero_floor = std::max(
        1e-300, std::min(1e-13 * std::max(1.0, std::abs(z_start)),
                         0.1 * std::abs(z_start)));

    std::vector<double> grid =
        sample_grid(pr.sigma1, pr.sigma2, pr.sigma2 - x_start, margin1, p_right);

    DenseResult res;
    ZCurve& zc = res.curve;
    zc.sigma1 = pr.sigma1;
    zc.sigma2 = pr.sigma2;
    double x = x_start, z = z_start;
    zc.phi.push_back(x);
    zc.z.push_back(z);
    auto none = [](double, double, double) {};
    // When q has a high-order zero at sigma2 and c > h(sigma2), the
    // trajectory leaves sigma2 along the slow manifold z = -q/(c - h),
    // which attracts at rate q/z^2; an explicit stepper underflows there.
    // While pinned to that manifold, advance along it analytically.
    auto slow_z = [&](double xx) {
        double d = pr.c - pr.h(xx);
        return d > 0.0 ? -pr.q(xx) / d : 0.0;
    };
    auto stiffness = [&](double xx) {
        double d = pr.c - pr.h(xx), qq = pr.q(xx);
        return d > 0.0 && qq > 0.0 ? d * d / qq : 0.0;
    };
    for (double target : grid) {
        if (target >= x) continue;
        {
            double zs = slow_z(x);
            bool pinned =
                zs < 0.0 && std::abs(z - zs) <= 0.3 * std::abs(zs);
            if (pinned && stiffness(target) * L >= 1e7) {
                x = target;
                z = slow_z(target);
                zc.phi.push_back(x);
                zc.z.push_back(z);
                continue;
            }
        }
        OdeOutcome oc = integrate_scalar(rhs, x, z, target, oo, none);
        if (oc.status == OdeStatus::StepUnderflow) {
            double zs = slow_z(oc.x);
            bool pinned = zs < 0.0 && std::abs(oc.y - zs) <= 0.3 * std::abs(zs);
            if (pinned) {
                // moderate stiffness: snap onto the manifold and retry
                oc = integrate_scalar(rhs, oc.x, zs, target, oo, none);
            }
        }
        x = oc.x;
        z = oc.y;
        bool grazing = oc.status == OdeStatus::StepUnderflow &&
                       std::abs(z) <= 1e-6 * std::max(1.0, std::abs(z_start));
        if (oc.status == OdeStatus::HitZero || grazing) {
            res.interior_zero = (x - pr.sigma1) > 0.05 * L;
            res.zero_at = x;
            zc.phi.push_back(x);
            zc.z.push_back(z);
            break;
        }
        if (oc.status != OdeStatus::ReachedEnd)
            throw SolverError("stepper failed while integrating the reduced equation");
        zc.phi.push_back(x);
        zc.z.push_back(z);
    }
    std::reverse(zc.phi.begin(), zc.phi.end());
    std::reverse(zc.z.begin(), zc.z.end());
    return res;
}

// One-sided endpoint exponent of |z| measured from nearby samples.
double measured_exponent(const std::vector<double>& phi,
                         const std::vector<double>& z, double endpoint,
                         bool left) {
    std::size_t n = phi.size();
    if (n < 18) return 1.0;
    // Skip the innermost samples: the seed point and any grazing-zero tail
    // carry the largest relative error.
    std::size_t i0 = left ? 2 : n - 3;
    std::size_t i1 = left ? 14 : n - 15;
    double s0 = std::abs(phi[i0] - endpoint), s1 = std::abs(phi[i1] - endpoint);
    double a0 = std::abs(z[i0]), a1 = std::abs(z[i1]);
    if (s0 <= 0 || s1 <= 0 || a0 <= 0 || a1 <= 0 || s0 == s1) return 1.0;
    return std::log(a1 / a0) / std::log(s1 / s0);
}

void finish_endpoints(ZCurve& zc, const SingularProblem& pr, double z_left,
                      double z_right, double tolz) {
    double L = pr.sigma2 - pr.sigma1;
    zc.z_left = std::abs(z_left) <= tolz ? 0.0 : z_left;
    zc.z_right = std::abs(z_right) <= tolz ? 0.0 : z_right;

    if (zc.z_right != 0.0) {
        zc.zdot_right = eval_robust(pr.h, pr.sigma2, 1e-12 * L) - pr.c;
    } else {
        double p = measured_exponent(zc.phi, zc.z, pr.sigma2, false);
        if (p < 0.98) {
            zc.zdot_right_infinite = true;
            zc.zdot_right = std::numeric_limits<double>::infinity();
        } else if (p > 1.02) {
            zc.zdot_right = 0.0;
        } else {
            zc.zdot_right = zc.z.back() / (zc.phi.back() - pr.sigma2);
        }
    }
    if (zc.z_left != 0.0) {
        double m = 0.0;
        if (zc.phi.size() >= 2)
            m = (zc.z[1] - zc.z[0]) / (zc.phi[1] - zc.phi[0]);
        zc.zdot_left = m;
    } else {
        double p = measured_exponent(zc.phi, zc.z, pr.sigma1, true);
        if (p < 0.98) {
            zc.zdot_left_infinite = true;
            zc.zdot_left = -std::numeric_limits<double>::infinity();
        } else if (p > 1.02) {
            zc.zdot_left = 0.0;
        } else {
            zc.zdot_left = zc.z.front() / (zc.phi.front() - pr.sigma1);
        }
    }
}

}  // namespace

double zero_tolerance(const Fn& q, double sigma1, double sigma2, int grid) {
    return 1e-7 * std::sqrt(std::max(1e-300, max_q(q, sigma1, sigma2, grid)));
}

double ZCurve::eval(double x) const {
    if (phi.empty()) throw SolverError("empty curve");
    if (x <= sigma1) return z_left;
    if (x >= sigma2) return z_right;
    if (x <= phi.front()) {
        if (z_left != 0.0) {
            double t = (x - sigma1) / (phi.front() - sigma1);
            return z_left + (z.front() - z_left) * t;
        }
        // Power-model extrapolation anchored a few samples in: the innermost
        // points carry the largest relative error.
        std::size_t ib = std::min<std::size_t>(2, phi.size() - 1);
        std::size_t i1 = std::min<std::size_t>(14, phi.size() - 1);
        double s0 = phi[ib] - sigma1;
        double p = std::log(std::abs(z[i1] / z[ib])) /
                   std::log((phi[i1] - sigma1) / s0);
        if (!std::isfinite(p)) p = 1.0;
        p = std::min(std::max(p, 0.05), 6.0);
        if (x <= phi[ib])
            return z[ib] * std::pow((x - sigma1) / s0, p);
    }
    if (x >= phi.back()) {
        if (z_right != 0.0) {
            double t = (sigma2 - x) / (sigma2 - phi.back());
            return z_right + (z.back() - z_right) * t;
        }
        std::size_t n = phi.size();
        std::size_t ib = n - 1 - std::min<std::size_t>(2, n - 1);
        std::size_t i1 = n - 1 - std::min<std::size_t>(14, n - 1);
        double s0 = sigma2 - phi[ib];
        double p = std::log(std::abs(z[i1] / z[ib])) /
                   std::log((sigma2 - phi[i1]) / s0);
        if (!std::isfinite(p)) p = 1.0;
        p = std::min(std::max(p, 0.05), 6.0);
        if (x >= phi[ib])
            return z[ib] * std::pow((sigma2 - x) / s0, p);
    }
    auto it = std::lower_bound(phi.begin(), phi.end(), x);
    std::size_t i = static_cast<std::size_t>(it - phi.begin());
    if (i == 0) return z.front();
    // Monotone cubic Hermite interpolation (Fritsch-Butland limiter): it
    // never overshoots the sample values, so the sign of z is preserved.
    std::size_t n = phi.size();
    auto secant = [&](std::size_t k) {
        return (z[k + 1] - z[k]) / (phi[k + 1] - phi[k]);
    };
    auto node_slope = [&](std::size_t k) {
        if (k == 0) return secant(0);
        if (k + 1 == n) return secant(n - 2);
        double d0 = secant(k - 1), d1 = secant(k);
        if (d0 * d1 <= 0.0) return 0.0;
        double h0 = phi[k] - phi[k - 1], h1 = phi[k + 1] - phi[k];
        return 3.0 * (h0 + h1) /
               ((2.0 * h1 + h0) / d0 + (h1 + 2.0 * h0) / d1);
    };
    double hseg = phi[i] - phi[i - 1];
    double t = (x - phi[i - 1]) / hseg;
    double m0 = node_slope(i - 1), m1 = node_slope(i);
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * z[i - 1] + (t3 - 2 * t2 + t) * hseg * m0 +
           (-2 * t3 + 3 * t2) * z[i] + (t3 - t2) * hseg * m1;
}

ZCurve solve_zeta(const SingularProblem& p, const SolverOptions& opt) {
    double L = p.sigma2 - p.sigma1;
    if (!(L > 0.0)) throw SolverError("empty interval");
    double tolz = opt.zero_scale > 0.0
                      ? opt.zero_scale
                      : zero_tolerance(p.q, p.sigma1, p.sigma2, opt.grid);
    double eps = 1e-6 * L;
    SeedInfo seed = make_seed(p, eps);
    DenseResult dr = integrate_dense(p, p.sigma2 - eps, seed.z0, seed.p, opt);
    if (dr.interior_zero)
        throw SolverError("trajectory vanished inside the interval at x = " +
                          std::to_string(dr.zero_at));
    finish_endpoints(dr.curve, p, dr.curve.z.front(), 0.0, tolz);
    return dr.curve;
}

double zeta_left_value(const SingularProblem& p, const SolverOptions& opt) {
    double L = p.sigma2 - p.sigma1;
    double tolz = opt.zero_scale > 0.0
                      ? opt.zero_scale
                      : zero_tolerance(p.q, p.sigma1, p.sigma2, opt.grid);
    double eps = 1e-6 * L;
    SeedInfo seed = make_seed(p, eps);
    Rhs rhs{p.q, p.h, p.c, 1e-12 * L};
    OdeOptions oo;
    oo.reltol = opt.reltol;
    auto none = [](double, double, double) {};
    // If the trajectory leaves sigma2 pinned to the slow manifold
    // z = -q/(c - h) (high-order tangency, c > h(sigma2)), walk along the
    // manifold until the attraction rate is manageable for the stepper;
    // the values there are far below the zero floor but are not a zero.
    double x0 = p.sigma2 - eps, z0 = seed.z0;
    {
        double d0 = p.c - p.h(x0);
        double zs0 = d0 > 0.0 ? -p.q(x0) / d0 : 0.0;
        if (zs0 < 0.0 && std::abs(z0 - zs0) <= 0.3 * std::abs(zs0)) {
            while (x0 > p.sigma1 + 0.75 * L) {
                double xn = p.sigma2 - (p.sigma2 - x0) * 1.5;
                if (xn <= p.sigma1 + 0.75 * L) break;
                double d = p.c - p.h(xn), qq = p.q(xn);
                if (!(d > 0.0 && qq > 0.0) || d * d / qq * L < 1e7) break;
                x0 = xn;
                z0 = -qq / d;
            }
        }
    }
    // Values within the zero tolerance count as vanished anyway, so the
    // probe may stop as soon as it dips that close to zero; the floor is
    // kept below the starting magnitude so the start is never a false hit.
    oo.zero_floor = std::max(1e-13 * std::max(1.0, std::abs(z0)),
                             std::min(0.3 * tolz, 0.5 * std::abs(z0)));
    OdeOutcome oc = integrate_scalar(rhs, x0, z0, p.sigma1 + 1e-9 * L, oo, none);
    if (oc.status == OdeStatus::HitZero) return 0.0;
    // A step underflow happens only while grazing z = 0, where the quotient
    // term stiffens without bound; report the grazing value itself.
    if (oc.status == OdeStatus::StepUnderflow) return oc.y;
    if (oc.status != OdeStatus::ReachedEnd)
        throw SolverError("stepper failed while integrating the reduced equation");
    return oc.y;
}

CStar compute_cstar(const Fn& q, const Fn& h, double sigma1, double sigma2,
                    const SolverOptions& opt) {
    CStar cs;
    double L = sigma2 - sigma1;
    double tolz = zero_tolerance(q, sigma1, sigma2, opt.grid);

    SupResult supq = difference_quotient_sup(q, sigma1, 0.0, sigma1, sigma2,
                                             opt.grid, false, true);
    double h1 = eval_robust(h, sigma1, 1e-12 * L);
    if (supq.infinite) {
        cs.plus_infinite = true;
        cs.value = std::numeric_limits<double>::infinity();
        cs.lower = h1;
        cs.upper = cs.value;
        cs.upper_finite = false;
        return cs;
    }

    // Mean of h over [sigma1, x]: the difference quotient of the flux.
    double sup_mean_h = h1;
    {
        int n = std::max(opt.grid, 256);
        double acc = 0.0, prev = h1, step = L / n;
        for (int i = 1; i <= n; ++i) {
            double x = sigma1 + step * i;
            double hv = eval_robust(h, x, 1e-12 * L);
            acc += 0.5 * (prev + hv) * step;
            prev = hv;
            sup_mean_h = std::max(sup_mean_h, acc / (x - sigma1));
        }
    }

    DiniResult dlow = dini_estimate(q, sigma1, Side::Right, DiniKind::Lower,
                                    0.1 * L, sigma1, sigma2);
    double qlow = std::max(0.0, dlow.plus_infinite ? 0.0 : dlow.value);
    double lo = std::max(sup_mean_h, h1 + 2.0 * std::sqrt(qlow));
    double up = sup_mean_h + 2.0 * std::sqrt(std::max(0.0, supq.value));
    cs.lower = lo;
    cs.upper = up;
    if (up < lo) std::swap(lo, up);

    auto vanishes = [&](double c) {
        SingularProblem p{q, h, c, sigma1, sigma2};
        return zeta_left_value(p, opt) >= -tolz;
    };

    double w = std::max(1.0, up - lo);
    lo -= 1e-3;  // make the bracket strict on both sides before verifying
    up += 1e-3;
    int k = 0;
    while (vanishes(lo) && k++ < 20) { lo -= w; w *= 2.0; }
    if (vanishes(lo))
        throw SolverError("no strictly admissible speed found below the bracket");
    w = std::max(1.0, up - lo);
    k = 0;
    while (!vanishes(up) && k++ < 20) { up += w; w *= 2.0; }
    if (!vanishes(up))
        throw SolverError("critical speed exceeds the expanded bracket");

    while (up - lo > opt.bisect_tol) {
        double mid = 0.5 * (lo + up);
        if (vanishes(mid)) up = mid; else lo = mid;
    }
    // Near a linearly-determined threshold the shooting value decays like an
    // essential singularity in c, so the bisection saturates slightly below
    // the true value; the rigorous lower estimate is then the better answer.
    cs.value = std::max(0.5 * (lo + up), cs.lower);
    return cs;
}

double compute_beta(const Fn& q, const Fn& h, double c, double sigma1,
                    double sigma2, const SolverOptions& opt) {
    double L = sigma2 - sigma1;
    double tolz = zero_tolerance(q, sigma1, sigma2, opt.grid);
    double scale = std::sqrt(std::max(1e-300, max_q(q, sigma1, sigma2, opt.grid)));
    Rhs rhs{q, h, c, 1e-12 * L};
    OdeOptions oo;
    oo.reltol = opt.reltol;

    auto admissible = [&](double s) {
        oo.zero_floor =
            std::max(1e-13 * std::max(1.0, std::abs(s)), 0.3 * tolz);
        auto none = [](double, double, double) {};
        OdeOutcome oc =
            integrate_scalar(rhs, sigma2, s, sigma1 + 1e-9 * L, oo, none);
        if (oc.status == OdeStatus::HitZero) return true;
        if (oc.status != OdeStatus::ReachedEnd &&
            oc.status != OdeStatus::StepUnderflow)
            throw SolverError("stepper failed while probing the solution family");
        return oc.y >= -tolz;
    };

    double s_in = -1e-3 * scale;
    int k = 0;
    while (!admissible(s_in) && k++ < 30) s_in *= 0.25;
    if (!admissible(s_in))
        throw SolverError("no member of the family vanishes on the left: "
                          "the speed is below the critical value");
    double s_out = -scale;
    k = 0;
    while (admissible(s_out) && k++ < 60) s_out *= 2.0;
    if (admissible(s_out))
        throw SolverError("family boundary not bracketed");
    while (s_in - s_out > opt.bisect_tol * std::max(1.0, scale)) {
        double mid = 0.5 * (s_in + s_out);
        if (admissible(mid)) s_in = mid; else s_out = mid;
    }
    return 0.5 * (s_in + s_out);
}

ZCurve solve_family_member(const SingularProblem& p, double s,
                           bool require_left_zero, const SolverOptions& opt) {
    double tolz = opt.zero_scale > 0.0
                      ? opt.zero_scale
                      : zero_tolerance(p.q, p.sigma1, p.sigma2, opt.grid);
    if (s > 0.0) throw SolverError("family parameter must be non-positive");
    if (-s <= tolz) return solve_zeta(p, opt);

    DenseResult dr = integrate_dense(p, p.sigma2, s, 1.0, opt);
    if (dr.interior_zero)
        throw SolverError("family member vanished inside the interval");
    double z_left = dr.curve.z.front();
    if (require_left_zero && z_left < -10.0 * tolz)
        throw SolverError("family member does not vanish at the left endpoint");
    finish_endpoints(dr.curve, p, z_left, s, tolz);
    return dr.curve;
}

std::pair<double, double> indicial_slopes(double qdot_end, double h_end,
                                          double c) {
    double b = h_end - c;
    double disc = b * b - 4.0 * qdot_end;
    if (disc < 0.0)
        throw SolverError("complex indicial roots: no real slope at the endpoint");
    double rt = std::sqrt(disc);
    double m1 = 0.5 * (b - rt), m2 = 0.5 * (b + rt);
    return {m1, m2};
}

Fn transform(Fn F, TransformKind k) {
    switch (k) {
        case TransformKind::Identity:
            return F;
        case TransformKind::Bar:
            return [F = std::move(F)](double x) { return F(1.0 - x); };
        case TransformKind::Tilde:
            return [F = std::move(F)](double x) { return -F(1.0 - x); };
    }
    throw std::logic_error("bad transform");
}

double transform_point(double x, TransformKind k) {
    return k == TransformKind::Identity ? x : 1.0 - x;
}

}  // namespace tw
