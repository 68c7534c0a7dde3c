#include "tw/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tw {

namespace {
constexpr double kInfThreshold = 1e9;

std::optional<double> safe(const Fn& F, double x) {
    try {
        return F(x);
    } catch (const EvalError&) {
        return std::nullopt;
    }
}
}  // namespace

Piecewise::Piecewise(Expr single, double lo, double hi) {
    pieces_.push_back({lo, hi, std::move(single)});
}

Piecewise::Piecewise(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty())
        throw std::invalid_argument("piecewise coefficient needs at least one piece");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
        if (pieces_[i].hi != pieces_[i + 1].lo || pieces_[i].lo >= pieces_[i].hi)
            throw std::invalid_argument("piecewise coefficient pieces must be "
                                        "contiguous and ascending");
    }
}

double Piecewise::operator()(double x) const {
    for (const auto& p : pieces_)
        if (x <= p.hi) return p.expr.eval(x);
    return pieces_.back().expr.eval(x);
}

std::optional<double> Piecewise::try_eval(double x) const {
    try {
        return (*this)(x);
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

Piecewise Piecewise::derivative() const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_)
        out.push_back({p.lo, p.hi, p.expr.derivative()});
    return Piecewise(std::move(out));
}

double CoefficientSet::flux(double phi) const {
    if (f) return (*f)(phi) - (*f)(0.0);
    // Composite Simpson on [0, phi] with a fixed fine subdivision; h can
    // have kinks but stays bounded, so this is plenty accurate.
    int n = 512;
    double acc = 0.0, a = 0.0;
    double step = phi / n;
    if (step == 0.0) return 0.0;
    auto hv = [&](double x) {
        auto v = h.try_eval(x);
        return v ? *v : 0.0;
    };
    for (int i = 0; i < n; ++i) {
        double l = a + i * step, r = l + step, m = 0.5 * (l + r);
        acc += (step / 6.0) * (hv(l) + 4.0 * hv(m) + hv(r));
    }
    return acc;
}

ValidationReport CoefficientSet::validate() const {
    ValidationReport rep;
    auto issue = [&](const char* a, const std::string& msg, double w) {
        rep.issues.push_back({a, msg, w});
    };
    const double tol0 = 1e-9;

    if (!(alpha > 0.0 && alpha < 1.0))
        issue("alpha-range", "alpha must lie in (0,1)", alpha);
    if (!(gamma > 0.0 && gamma < 1.0))
        issue("gamma-range", "gamma must lie in (0,1)", gamma);

    auto zero_at = [&](const Piecewise& F, double x, const char* tag,
                       const std::string& name) {
        auto v = F.try_eval(x);
        if (!v)
            issue(tag, name + " not evaluable at required zero", x);
        else if (std::abs(*v) > tol0)
            issue(tag, name + " must vanish here", x);
    };
    zero_at(D, alpha, "D-zeros", "D");
    zero_at(g, 0.0, "g-zeros", "g");
    zero_at(g, gamma, "g-zeros", "g");
    zero_at(g, 1.0, "g-zeros", "g");

    // Sign pattern on a grid, skipping points too close to the zeros.
    int n = std::max(grid, 64);
    for (int i = 1; i < n; ++i) {
        double x = static_cast<double>(i) / n;
        auto dv = D.try_eval(x);
        if (dv && std::abs(x - alpha) > 2.0 / n) {
            bool ok = x < alpha ? *dv > 0.0 : *dv < 0.0;
            if (!ok) {
                issue("D-sign", "D must be positive left of alpha and negative right of it", x);
                break;
            }
        }
    }
    for (int i = 1; i < n; ++i) {
        double x = static_cast<double>(i) / n;
        auto gv = g.try_eval(x);
        if (gv && std::abs(x - gamma) > 2.0 / n) {
            bool ok = x < gamma ? *gv < 0.0 : *gv > 0.0;
            if (!ok) {
                issue("g-sign", "g must be negative left of gamma and positive right of it", x);
                break;
            }
        }
    }

    if (f) {
        auto f0 = f->try_eval(0.0);
        if (f0 && std::abs(*f0) > tol0)
            issue("f-normalisation", "f(0) must be 0", 0.0);
        // h must be the derivative of f where both evaluate cleanly.
        Piecewise fd = f->derivative();
        for (int i = 1; i < 64; ++i) {
            double x = i / 64.0;
            auto a = fd.try_eval(x);
            auto b = h.try_eval(x);
            if (a && b && std::abs(*a - *b) > 1e-6 * (1.0 + std::abs(*b))) {
                issue("f-h-consistency", "h must equal the derivative of f", x);
                break;
            }
        }
    }
    return rep;
}

CoefficientSet make_coefficient_set(std::optional<Piecewise> f,
                                    Piecewise D, Piecewise g,
                                    std::optional<Piecewise> h,
                                    double alpha, double gamma, int grid) {
    if (!f && !h)
        throw std::invalid_argument("either f or h must be supplied");
    CoefficientSet cs;
    cs.f = std::move(f);
    cs.D = std::move(D);
    cs.g = std::move(g);
    cs.h = h ? std::move(*h) : cs.f->derivative();
    cs.Ddot = cs.D.derivative();
    cs.alpha = alpha;
    cs.gamma = gamma;
    cs.grid = grid;
    return cs;
}

SupResult difference_quotient_sup(const Fn& F, double x0, double Fx0,
                                  double a, double b, int n,
                                  bool include_a, bool include_b) {
    SupResult res;
    res.value = -std::numeric_limits<double>::infinity();
    double L = b - a;
    auto quot = [&](double x) -> std::optional<double> {
        if (std::abs(x - x0) < 1e-14 * std::max(1.0, std::abs(x0)))
            return std::nullopt;
        auto v = safe(F, x);
        if (!v) return std::nullopt;
        return (*v - Fx0) / (x - x0);
    };
    auto consider = [&](double x) {
        auto qv = quot(x);
        if (qv) res.value = std::max(res.value, *qv);
    };

    for (int i = 0; i <= n; ++i) {
        double x = a + L * i / n;
        if ((i == 0 && !include_a) || (i == n && !include_b)) continue;
        consider(x);
    }

    // Geometric approach sequences toward x0 and toward excluded endpoints;
    // they catch suprema attained only in the limit and flag divergence.
    auto approach = [&](double target, int dir) {
        double last = -std::numeric_limits<double>::infinity();
        int rising = 0;
        std::vector<double> trail;  // accepted values, deepest last
        for (int k = 1; k <= 45; ++k) {
            double x = target + dir * L * std::pow(0.5, k);
            if (x <= a || x >= b) continue;
            auto qv = quot(x);
            if (!qv) continue;
            res.value = std::max(res.value, *qv);
            if (*qv > last) ++rising; else rising = 0;
            last = *qv;
            trail.push_back(last);
        }
        if (last > kInfThreshold && rising >= 3) res.infinite = true;
        // A quotient that keeps growing geometrically across halving
        // scales diverges like a power, even if it has not yet reached
        // the hard threshold.
        std::size_t m = trail.size();
        if (rising >= 8 && m >= 9 && trail[m - 9] > 0.0 &&
            trail[m - 1] >= 2.0 * trail[m - 9])
            res.infinite = true;
    };
    approach(x0, +1);
    approach(x0, -1);
    if (!include_a) approach(a, +1);
    if (!include_b) approach(b, -1);

    if (res.value == -std::numeric_limits<double>::infinity()) res.value = 0.0;
    return res;
}

DiniResult dini_estimate(const Fn& F, double x0, Side side, DiniKind kind,
                         double h0, double lo, double hi) {
    DiniResult res;
    auto F0 = safe(F, x0);
    if (!F0) return res;
    int dir = side == Side::Right ? +1 : -1;
    double room = side == Side::Right ? hi - x0 : x0 - lo;
    double step0 = std::min(h0, 0.5 * room);
    if (step0 <= 0.0) return res;

    std::vector<double> q;
    for (int k = 0; k <= 34; ++k) {
        double h = step0 * std::pow(0.5, k);
        auto v = safe(F, x0 + dir * h);
        if (!v) continue;
        q.push_back((*v - *F0) / (dir * h));
    }
    if (q.empty()) return res;

    // Divergence: the tail grows monotonically past the threshold.
    std::size_t m = q.size();
    if (m >= 3) {
        double a = q[m - 3], b = q[m - 2], c = q[m - 1];
        if (c > kInfThreshold && c >= b && b >= a) res.plus_infinite = true;
        if (c < -kInfThreshold && c <= b && b <= a) res.minus_infinite = true;
    }
    // Power-law divergence: sustained geometric growth of |q| across
    // halving scales, with a consistent sign along the tail.
    if (m >= 9) {
        bool up = true, down = true;
        for (std::size_t i = m - 8; i < m; ++i) {
            up = up && q[i] > q[i - 1] && q[i] > 0.0;
            down = down && q[i] < q[i - 1] && q[i] < 0.0;
        }
        if (up && q[m - 9] > 0.0 && q[m - 1] >= 2.0 * q[m - 9])
            res.plus_infinite = true;
        if (down && q[m - 9] < 0.0 && q[m - 1] <= 2.0 * q[m - 9])
            res.minus_infinite = true;
    }

    // Limit estimate over the late (small-step) window, avoiding the last
    // few entries where floating-point cancellation dominates.
    std::size_t first = m > 14 ? m - 14 : 0;
    std::size_t last = m > 4 ? m - 4 : m;
    double best = q[first];
    for (std::size_t i = first; i < last; ++i)
        best = kind == DiniKind::Upper ? std::max(best, q[i]) : std::min(best, q[i]);
    res.value = best;
    return res;
}

PowerFit fit_power(const Fn& F, double x0, Side side,
                   double smin, double smax, int npts) {
    PowerFit fit;
    if (!(smin > 0.0 && smax > smin) || npts < 3) return fit;
    int dir = side == Side::Right ? +1 : -1;
    std::vector<double> lx, ly;
    for (int i = 0; i < npts; ++i) {
        double s = smin * std::pow(smax / smin, static_cast<double>(i) / (npts - 1));
        auto v = safe(F, x0 + dir * s);
        if (!v || std::abs(*v) < 1e-300) continue;
        lx.push_back(std::log(s));
        ly.push_back(std::log(std::abs(*v)));
    }
    if (lx.size() < 3) return fit;
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) return fit;
    fit.r = (n * sxy - sx * sy) / denom;
    double b = (sy - fit.r * sx) / n;
    fit.A = std::exp(b);
    double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        double e = ly[i] - (b + fit.r * lx[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    fit.ok = true;
    return fit;
}

}  // namespace tw
