#include "tw/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tw/quadrature.hpp"

namespace tw {

namespace {

double robust(const Piecewise& F, double x) {
    auto v = F.try_eval(x);
    if (v) return *v;
    v = F.try_eval(x - 1e-12);
    if (v) return *v;
    return F(x + 1e-12);
}

Fn q_of(const CoefficientSet& cs) {
    return [&cs](double x) { return cs.q(x); };
}

double integral_q(const CoefficientSet& cs, double a, double b) {
    auto f = [&](double x) {
        try {
            return cs.q(x);
        } catch (const EvalError&) {
            return cs.q(x + 1e-12);
        }
    };
    return adaptive_quad(f, a, b, 1e-10);
}

// Second differences of the flux on a grid: >= -tol means convex,
// <= tol means concave (strictly, away from rounding).
enum class Shape { Convex, Concave, Neither };
Shape flux_shape(const CoefficientSet& cs) {
    int n = 1024;
    std::vector<double> fv(n + 1);
    for (int i = 0; i <= n; ++i) fv[i] = cs.flux(static_cast<double>(i) / n);
    double tol = 1e-9;
    bool convex = true, concave = true;
    for (int i = 1; i < n; ++i) {
        double d2 = fv[i + 1] - 2.0 * fv[i] + fv[i - 1];
        if (d2 < -tol) convex = false;
        if (d2 > tol) concave = false;
    }
    if (convex) return Shape::Convex;
    if (concave) return Shape::Concave;
    return Shape::Neither;
}

}  // namespace

GrowthFlags check_g_growth(const CoefficientSet& cs) {
    GrowthFlags out;
    Fn g = [&cs](double x) { return cs.g(x); };
    double room_l = cs.gamma, room_r = 1.0 - cs.gamma;
    double smax_l = std::min(1e-2, 0.5 * room_l);
    double smax_r = std::min(1e-2, 0.5 * room_r);
    PowerFit fl = fit_power(g, cs.gamma, Side::Left, 1e-6, smax_l, 30);
    PowerFit fr = fit_power(g, cs.gamma, Side::Right, 1e-6, smax_r, 30);

    const double fit_tol = 0.05;
    bool fl_ok = fl.ok && fl.residual < fit_tol;
    bool fr_ok = fr.ok && fr.residual < fit_tol;
    out.g_sublinear_left = fl_ok && fl.r >= 0.98;
    out.g_sublinear_right = fr_ok && fr.r >= 0.98;

    if (fl_ok && fr_ok) {
        out.tau = std::max(fl.r, fr.r);
        if (out.tau < 0.999) {
            // Verify the lower bound |g| >= L |phi-gamma|^tau on a grid.
            double L = std::min(fl.A, fr.A);
            for (int i = 1; i <= 50; ++i) {
                double s = 1e-6 * std::pow(smax_l / 1e-6, i / 50.0);
                if (s < room_l) {
                    double ratio = std::abs(robust(cs.g, cs.gamma - s)) /
                                   std::pow(s, out.tau);
                    L = std::min(L, ratio);
                }
                double s2 = 1e-6 * std::pow(smax_r / 1e-6, i / 50.0);
                if (s2 < room_r) {
                    double ratio = std::abs(robust(cs.g, cs.gamma + s2)) /
                                   std::pow(s2, out.tau);
                    L = std::min(L, ratio);
                }
            }
            if (L > 1e-12) {
                out.integrability = true;
                out.L = 0.9 * L;
            }
        }
    }
    return out;
}

ConditionReport check_necessary_convex(const CoefficientSet& cs) {
    ConditionReport rep;
    if (flux_shape(cs) != Shape::Convex) {
        rep.verdict = Verdict::Undecidable;
        rep.detail = "the convection flux is not convex";
        return rep;
    }
    rep.lhs = integral_q(cs, 0.0, cs.alpha);
    rep.rhs = 0.0;
    rep.verdict = rep.lhs > 0.0 ? Verdict::Holds : Verdict::Fails;
    rep.detail = "integral of D*g over (0,alpha) against 0; any wavefront "
                 "speed must then exceed h(alpha) = " +
                 std::to_string(robust(cs.h, cs.alpha));
    return rep;
}

ConditionReport check_sufficient_convex(const CoefficientSet& cs) {
    ConditionReport rep;
    if (flux_shape(cs) != Shape::Convex) {
        rep.verdict = Verdict::Undecidable;
        rep.detail = "the convection flux is not convex";
        return rep;
    }
    SupResult sup1 = difference_quotient_sup(q_of(cs), 1.0, 0.0, cs.alpha, 1.0,
                                             cs.grid, true, false);
    if (sup1.infinite || sup1.value < 0.0) {
        rep.verdict = Verdict::Undecidable;
        rep.detail = "unbounded difference quotient of D*g at 1";
        return rep;
    }
    double h1 = robust(cs.h, 1.0), h0 = robust(cs.h, 0.0);
    double Sigma = h1 - h0 + 2.0 * std::sqrt(sup1.value);
    double M = 0.0;
    int n = std::max(cs.grid, 256);
    for (int i = 0; i <= n; ++i) {
        double x = cs.gamma * i / n;
        auto v = cs.D.try_eval(x);
        auto w = cs.g.try_eval(x);
        if (v && w) M = std::max(M, -(*v) * (*w));
    }
    rep.lhs = integral_q(cs, 0.0, cs.alpha);
    rep.rhs = (2.0 * cs.alpha * cs.alpha * Sigma / 3.0) *
              (Sigma + std::sqrt(Sigma * Sigma + 2.0 * M / cs.alpha));
    rep.verdict = rep.lhs >= rep.rhs ? Verdict::Holds : Verdict::Fails;
    rep.detail = "integral of D*g over (0,alpha) against the bound built "
                 "from its difference quotients";
    return rep;
}

ConditionReport check_sufficient_concave(const CoefficientSet& cs) {
    ConditionReport rep;
    if (flux_shape(cs) != Shape::Concave) {
        rep.verdict = Verdict::Undecidable;
        rep.detail = "the convection flux is not strictly concave";
        return rep;
    }
    Fn q = q_of(cs);
    double h_gamma = robust(cs.h, cs.gamma);

    if (cs.alpha > cs.gamma) {
        // One-sided derivatives of g at gamma must agree and be positive.
        DiniResult dl = dini_estimate([&cs](double x) { return cs.g(x); },
                                      cs.gamma, Side::Left, DiniKind::Upper);
        DiniResult dr = dini_estimate([&cs](double x) { return cs.g(x); },
                                      cs.gamma, Side::Right, DiniKind::Upper);
        if (dl.plus_infinite || dr.plus_infinite || dl.value <= 0.0 ||
            dr.value <= 0.0 ||
            std::abs(dl.value - dr.value) >
                0.01 * std::max(std::abs(dl.value), std::abs(dr.value))) {
            rep.verdict = Verdict::Undecidable;
            rep.detail = "g has no positive two-sided derivative at gamma";
            return rep;
        }
        SupResult s1 = difference_quotient_sup(q, 1.0, 0.0, cs.alpha, 1.0,
                                               cs.grid, true, false);
        SupResult s2 = difference_quotient_sup(q, cs.gamma, 0.0, 0.0, cs.gamma,
                                               cs.grid, true, false);
        if (s1.infinite || s2.infinite) {
            rep.verdict = Verdict::Undecidable;
            rep.detail = "unbounded difference quotient of D*g";
            return rep;
        }
        rep.lhs = h_gamma -
                  (cs.flux(1.0) - cs.flux(cs.alpha)) / (1.0 - cs.alpha);
        rep.rhs = 2.0 * (std::sqrt(std::max(0.0, s1.value)) +
                         std::sqrt(std::max(0.0, s2.value)));
        rep.verdict = rep.lhs >= rep.rhs ? Verdict::Holds : Verdict::Fails;
        rep.detail = "slope gap at gamma against difference quotients "
                     "of D*g at 1 and gamma";
        return rep;
    }

    if (cs.alpha == cs.gamma) {
        GrowthFlags gf = check_g_growth(cs);
        if (!gf.integrability) {
            rep.verdict = Verdict::Undecidable;
            rep.detail = "the growth condition on g at gamma is not established";
            return rep;
        }
        SupResult s1 = difference_quotient_sup(q, 1.0, 0.0, cs.alpha, 1.0,
                                               cs.grid, true, false);
        SupResult s2 = difference_quotient_sup(q, cs.gamma, 0.0, 0.0, cs.gamma,
                                               cs.grid, true, false);
        if (s1.infinite || s2.infinite) {
            rep.verdict = Verdict::Undecidable;
            rep.detail = "unbounded difference quotient of D*g";
            return rep;
        }
        rep.lhs = h_gamma -
                  (cs.flux(1.0) - cs.flux(cs.alpha)) / (1.0 - cs.alpha);
        rep.rhs = 2.0 * (std::sqrt(std::max(0.0, s1.value)) +
                         std::sqrt(std::max(0.0, s2.value)));
        rep.verdict = rep.lhs >= rep.rhs ? Verdict::Holds : Verdict::Fails;
        rep.detail = "slope gap at gamma against difference quotients "
                     "of D*g at 1 and gamma, with the growth condition";
        return rep;
    }

    // alpha < gamma
    SupResult s1 = difference_quotient_sup(q, 1.0, 0.0, cs.gamma, 1.0,
                                           cs.grid, true, false);
    SupResult s2 = difference_quotient_sup(q, cs.alpha, 0.0, 0.0, cs.gamma,
                                           cs.grid, true, true);
    if (s1.infinite || s2.infinite) {
        rep.verdict = Verdict::Undecidable;
        rep.detail = "unbounded difference quotient of D*g";
        return rep;
    }
    rep.lhs = h_gamma - (cs.flux(1.0) - cs.flux(cs.gamma)) / (1.0 - cs.gamma);
    rep.rhs = 2.0 * (std::sqrt(std::max(0.0, s1.value)) +
                     std::sqrt(std::max(0.0, s2.value)));
    rep.verdict = rep.lhs > rep.rhs ? Verdict::Holds : Verdict::Fails;
    rep.detail = "slope gap at gamma against difference quotients of D*g "
                 "at 1 and alpha";
    return rep;
}

}  // namespace tw
