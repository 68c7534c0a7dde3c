#include "tw/speeds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tw {

namespace {

struct Canon {
    const CoefficientSet& cs;
    Fn q, h, q_t, h_t, h_b, h_neg;

    explicit Canon(const CoefficientSet& cs_) : cs(cs_) {
        q = [&cs = cs](double x) { return cs.q(x); };
        h = [&cs = cs](double x) { return cs.h(x); };
        q_t = transform(q, TransformKind::Tilde);
        h_t = transform(h, TransformKind::Tilde);
        h_b = transform(h, TransformKind::Bar);
        h_neg = [h = h](double x) { return -h(x); };
    }

    // Negative branch leaving 0: canonical problem on (1-min(a,g), 1).
    SingularProblem left(double c) const {
        double m = std::min(cs.alpha, cs.gamma);
        return {q_t, h_t, -c, 1.0 - m, 1.0};
    }
    // Positive branch reaching 1: canonical problem on (0, 1-max(a,g)).
    SingularProblem right(double c) const {
        double M = std::max(cs.alpha, cs.gamma);
        return {q_t, h_b, c, 0.0, 1.0 - M};
    }
    // alpha > gamma: middle negative branch, already canonical.
    SingularProblem mid_down(double c) const {
        return {q, h, c, cs.gamma, cs.alpha};
    }
    // alpha < gamma: middle positive branch, canonical after negation.
    SingularProblem mid_up(double c) const {
        return {q, h_neg, -c, cs.alpha, cs.gamma};
    }
};

// Map a canonical curve back to original coordinates. reflect: phi -> 1-phi;
// negate: z -> -z.
ZCurve map_back(const ZCurve& w, bool reflect, bool negate) {
    double sgn = negate ? -1.0 : 1.0;
    ZCurve out;
    if (!reflect) {
        out = w;
        if (negate) {
            for (auto& v : out.z) v = -v;
            out.z_left = -out.z_left;
            out.z_right = -out.z_right;
            out.zdot_left = -out.zdot_left;
            out.zdot_right = -out.zdot_right;
        }
        return out;
    }
    out.sigma1 = 1.0 - w.sigma2;
    out.sigma2 = 1.0 - w.sigma1;
    std::size_t n = w.phi.size();
    out.phi.resize(n);
    out.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.phi[i] = 1.0 - w.phi[n - 1 - i];
        out.z[i] = sgn * w.z[n - 1 - i];
    }
    out.z_left = sgn * w.z_right;
    out.z_right = sgn * w.z_left;
    out.zdot_left = -sgn * w.zdot_right;
    out.zdot_right = -sgn * w.zdot_left;
    out.zdot_left_infinite = w.zdot_right_infinite;
    out.zdot_right_infinite = w.zdot_left_infinite;
    return out;
}

double d_at(const CoefficientSet& cs, double x) {
    auto v = cs.D.try_eval(x);
    if (v) return *v;
    v = cs.D.try_eval(x - 1e-12);
    return v ? *v : cs.D(x + 1e-12);
}

}  // namespace

double GluedZ::eval(double phi) const {
    for (const auto& p : pieces)
        if (phi >= p.sigma1 && phi <= p.sigma2) return p.eval(phi);
    return 0.0;
}

double solve_c1star(const CoefficientSet& cs, const ThresholdSet& ts,
                    const SolverOptions& opt) {
    Canon cn(cs);
    auto F = [&](double c) {
        double z1 = zeta_left_value(cn.left(c), opt);
        double z2 = zeta_left_value(cn.mid_down(c), opt);
        return z1 - z2;
    };
    double lo = ts.c11.finite ? ts.c11.value : -1.0;
    double hi = ts.c12.finite ? ts.c12.value : 1.0;
    if (hi <= lo) hi = lo + 1.0;
    double w = std::max(1.0, hi - lo);
    int k = 0;
    while (F(lo) <= 0.0 && k++ < 20) { lo -= w; w *= 2.0; }
    if (F(lo) <= 0.0) throw SolverError("matching speed not bracketed from below");
    w = std::max(1.0, hi - lo);
    k = 0;
    while (F(hi) >= 0.0 && k++ < 20) { hi += w; w *= 2.0; }
    if (F(hi) >= 0.0) throw SolverError("matching speed not bracketed from above");
    while (hi - lo > opt.bisect_tol) {
        double mid = 0.5 * (lo + hi);
        if (F(mid) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double lambda_critical(const CoefficientSet& cs, double c,
                       const SolverOptions& opt) {
    if (!(cs.alpha < cs.gamma))
        throw SolverError("the junction family exists only for alpha < gamma");
    Canon cn(cs);
    double g_bar = 1.0 - cs.gamma;
    // beta for the middle branch (alpha, gamma), negated coordinates.
    double b1 = -compute_beta(cn.q, cn.h_neg, -c, cs.alpha, cs.gamma, opt);
    // beta for the right branch (gamma, 1) via reflection.
    double b2 = -compute_beta(cn.q_t, cn.h_b, c, 0.0, g_bar, opt);
    double beta = std::min(b1, b2);
    double Dg = d_at(cs, cs.gamma);
    if (Dg >= 0.0) throw SolverError("D(gamma) must be negative here");
    return beta / Dg;
}

SpeedReport admissible_speeds(const CoefficientSet& cs,
                              const SolverOptions& opt) {
    SpeedReport rep;
    double tol = opt.bisect_tol;
    rep.tag = cs.alpha > cs.gamma + 1e-14   ? CaseTag::AlphaGreater
              : cs.alpha < cs.gamma - 1e-14 ? CaseTag::AlphaLess
                                            : CaseTag::AlphaEqual;
    rep.thresholds = compute_named_thresholds(cs, opt);
    rep.growth = check_g_growth(cs);
    const ThresholdSet& ts = rep.thresholds;

    auto set_interval = [&](double lo, double hi, Inclusion li, Inclusion hi_i) {
        rep.J.empty = false;
        if (hi - lo <= 2.0 * tol) {
            rep.J.singleton = true;
            rep.J.lo = rep.J.hi = 0.5 * (lo + hi);
            rep.J.lo_inc = rep.J.hi_inc = Inclusion::Yes;
        } else {
            rep.J.singleton = false;
            rep.J.lo = lo;
            rep.J.hi = hi;
            rep.J.lo_inc = li;
            rep.J.hi_inc = hi_i;
        }
    };

    switch (rep.tag) {
        case CaseTag::AlphaGreater: {
            if (!ts.c12.present || !ts.c12.finite || ts.c11.minus_infinite ||
                !(ts.c11.value < ts.c12.value - tol))
                break;
            double c1;
            try {
                c1 = solve_c1star(cs, ts, opt);
            } catch (const SolverError&) {
                break;
            }
            bool above_c32 = !ts.c32.finite ? false : c1 >= ts.c32.value - tol;
            if (ts.c32.finite && above_c32) {
                rep.J.empty = false;
                rep.J.singleton = true;
                rep.J.lo = rep.J.hi = c1;
                rep.J.lo_inc = rep.J.hi_inc = Inclusion::Yes;
            }
            break;
        }
        case CaseTag::AlphaEqual: {
            if (!ts.c32.finite || ts.c11.minus_infinite) break;
            double lo = ts.c32.value;
            double hi = ts.c11.value;
            if (lo > hi + tol) break;
            Inclusion inc =
                rep.growth.integrability ? Inclusion::Yes : Inclusion::Unknown;
            set_interval(lo, std::max(lo, hi), inc, inc);
            break;
        }
        case CaseTag::AlphaLess: {
            if (!ts.c32.finite) break;
            double c11 = ts.c11.minus_infinite
                             ? -std::numeric_limits<double>::infinity()
                             : ts.c11.value;
            double c31 = ts.c31.minus_infinite
                             ? -std::numeric_limits<double>::infinity()
                             : ts.c31.value;
            double m = std::min(c11, c31);
            if (!std::isfinite(m) || ts.c32.value > m - tol) {
                // degenerate touching case: keep the single speed when the
                // interval collapses and the closure applies
                if (std::isfinite(m) && std::abs(ts.c32.value - m) <= tol &&
                    rep.growth.integrability) {
                    rep.J.empty = false;
                    rep.J.singleton = true;
                    rep.J.lo = rep.J.hi = 0.5 * (ts.c32.value + m);
                    rep.J.lo_inc = rep.J.hi_inc = Inclusion::Yes;
                }
                break;
            }
            if (rep.growth.integrability) {
                set_interval(ts.c32.value, m, Inclusion::Yes, Inclusion::Yes);
            } else {
                Inclusion hi_inc =
                    c11 < c31 ? Inclusion::Yes : Inclusion::Unknown;
                set_interval(ts.c32.value, m, Inclusion::No, hi_inc);
            }
            // Representative member of the junction family.
            double c_rep = rep.J.hi_inc == Inclusion::Yes
                               ? rep.J.hi
                               : 0.5 * (rep.J.lo + rep.J.hi);
            try {
                rep.lambda_rep = lambda_critical(cs, c_rep, opt);
                rep.beta_rep = rep.lambda_rep * d_at(cs, cs.gamma);
                rep.c_rep = c_rep;
                rep.family_valid = true;
            } catch (const SolverError&) {
                rep.family_valid = false;
            }
            break;
        }
    }
    return rep;
}

GluedZ solve_z_for_speed(const CoefficientSet& cs, const SpeedReport& rep,
                         double c, std::optional<double> lambda,
                         const SolverOptions& opt) {
    double tol = std::max(opt.bisect_tol, 1e-9);
    if (!rep.J.contains(c, 10.0 * tol))
        throw SolverError("requested speed is not admissible");
    Canon cn(cs);
    GluedZ gz;
    gz.c = c;
    gz.tag = rep.tag;
    gz.alpha = cs.alpha;
    gz.gamma = cs.gamma;

    auto check_left_zero = [&](const ZCurve& canon, const char* what) {
        double tolz =
            zero_tolerance(cn.q, 0.0, 1.0, opt.grid);
        if (canon.z_left < -1e3 * tolz)
            throw SolverError(std::string(what) +
                              ": branch does not vanish where required");
    };

    switch (rep.tag) {
        case CaseTag::AlphaGreater: {
            ZCurve w1 = solve_zeta(cn.left(c), opt);
            ZCurve w2 = solve_zeta(cn.mid_down(c), opt);
            ZCurve w3 = solve_zeta(cn.right(c), opt);
            check_left_zero(w3, "branch reaching 1");
            gz.pieces.push_back(map_back(w1, true, false));
            gz.pieces.push_back(map_back(w2, false, false));
            gz.pieces.push_back(map_back(w3, true, true));
            gz.z_gamma = gz.pieces[0].z_right;
            double Dg = d_at(cs, cs.gamma);
            gz.lambda = Dg != 0.0 ? gz.z_gamma / Dg : 0.0;
            break;
        }
        case CaseTag::AlphaEqual: {
            ZCurve w1 = solve_zeta(cn.left(c), opt);
            check_left_zero(w1, "branch leaving 0");
            ZCurve w3 = solve_zeta(cn.right(c), opt);
            check_left_zero(w3, "branch reaching 1");
            gz.pieces.push_back(map_back(w1, true, false));
            gz.pieces.push_back(map_back(w3, true, true));
            gz.z_gamma = 0.0;
            gz.lambda = 0.0;
            break;
        }
        case CaseTag::AlphaLess: {
            double lam = lambda ? *lambda : lambda_critical(cs, c, opt);
            if (lam > 0.0)
                throw SolverError("lambda must be non-positive");
            if (lam == 0.0 && !rep.growth.integrability)
                throw SolverError(
                    "lambda = 0 requires the integrability condition on g");
            double Dg = d_at(cs, cs.gamma);
            double s = lam * Dg;  // >= 0
            ZCurve w1 = solve_zeta(cn.left(c), opt);
            check_left_zero(w1, "branch leaving 0");
            ZCurve u = solve_family_member(cn.mid_up(c), -s, true, opt);
            ZCurve v = solve_family_member(cn.right(c), -s, true, opt);
            gz.pieces.push_back(map_back(w1, true, false));
            gz.pieces.push_back(map_back(u, false, true));
            gz.pieces.push_back(map_back(v, true, true));
            gz.z_gamma = s;
            gz.lambda = lam;
            break;
        }
    }
    return gz;
}

}  // namespace tw
