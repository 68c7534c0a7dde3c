#include "tw/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tw/quadrature.hpp"

namespace tw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double robust(const Piecewise& F, double x) {
    auto v = F.try_eval(x);
    if (v) return *v;
    v = F.try_eval(x - 1e-12);
    if (v) return *v;
    return F(x + 1e-12);
}

struct Branch {
    double lo = 0.0, hi = 0.0;
    // ascending in phi
    std::vector<double> phi, xi, dphi;
    double xi_lo = 0.0, xi_hi = 0.0;  // abscissae at the ends (xi_lo > xi_hi)
    bool lo_finite = true, hi_finite = true;
};

// Monotone branches of z: maximal runs of consecutive pieces joined where
// z does not vanish.
std::vector<std::pair<double, double>> branch_spans(const GluedZ& gz,
                                                    double tolz) {
    std::vector<std::pair<double, double>> spans;
    for (const auto& p : gz.pieces) {
        if (!spans.empty() && std::abs(spans.back().second - p.sigma1) < 1e-14 &&
            std::abs(p.z_left) > tolz)
            spans.back().second = p.sigma2;
        else
            spans.push_back({p.sigma1, p.sigma2});
    }
    return spans;
}

Branch integrate_branch(const CoefficientSet& cs, const GluedZ& gz,
                        double lo, double hi, double anchor_phi) {
    Branch br;
    br.lo = lo;
    br.hi = hi;
    double Lb = hi - lo;
    double edge = 0.25 * Lb;

    std::vector<double>& nodes = br.phi;
    for (double d = edge; d > 1e-10 * Lb; d *= 0.85) nodes.push_back(lo + d);
    std::sort(nodes.begin(), nodes.end());
    int n_mid = 400;
    for (int i = 1; i < n_mid; ++i)
        nodes.push_back(lo + edge + (Lb - 2.0 * edge) * i / n_mid);
    for (double d = edge; d > 1e-10 * Lb; d *= 0.85) nodes.push_back(hi - d);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    auto w = [&](double x) {
        double zv = gz.eval(x);
        if (zv == 0.0) zv = x - lo < hi - x ? -1e-300 : 1e-300;
        return robust(cs.D, x) / zv;
    };

    // Equidistribute in xi: split any interval whose reaching time exceeds
    // the target so the profile is resolved uniformly, including near
    // interior levels where D is small and the wave is stiff.
    const double target_dxi = 0.02;
    {
        std::vector<double> refined;
        refined.push_back(nodes.front());
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            double dxi = std::abs(gauss7(w, nodes[i - 1], nodes[i]));
            int parts = 1;
            if (std::isfinite(dxi) && dxi > target_dxi)
                parts = dxi >= 64.0 * target_dxi
                            ? 64
                            : static_cast<int>(dxi / target_dxi) + 1;
            // also cap the phi spacing: the outer graded intervals are
            // wide, and phi' can vary quickly across them when D is flat
            double dphi_cap = 2.5e-3 * Lb;
            double width = nodes[i] - nodes[i - 1];
            if (width > dphi_cap)
                parts = std::max(
                    parts, std::min(64, static_cast<int>(width / dphi_cap) + 1));
            for (int j = 1; j <= parts; ++j)
                refined.push_back(nodes[i - 1] +
                                  (nodes[i] - nodes[i - 1]) * j / parts);
        }
        nodes.swap(refined);
    }

    std::size_t n = nodes.size();
    br.xi.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        br.xi[i] = br.xi[i - 1] + gauss7(w, nodes[i - 1], nodes[i]);

    // dphi = z/D along the branch.
    br.dphi.assign(n, 0.0);
    double last = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double Dv = robust(cs.D, nodes[i]);
        double zv = gz.eval(nodes[i]);
        double v = Dv != 0.0 ? zv / Dv : last;
        if (!std::isfinite(v)) v = last;
        br.dphi[i] = v;
        last = v;
    }

    // Local anchor.
    double shift;
    {
        double target = (anchor_phi > lo && anchor_phi < hi)
                            ? anchor_phi
                            : 0.5 * (lo + hi);
        auto it = std::lower_bound(nodes.begin(), nodes.end(), target);
        std::size_t i = std::min<std::size_t>(it - nodes.begin(), n - 1);
        shift = br.xi[i];
    }
    for (auto& x : br.xi) x -= shift;

    TailResult tlo = improper_to_endpoint(w, nodes.front(), lo);
    TailResult thi = improper_to_endpoint(w, nodes.back(), hi);
    br.lo_finite = tlo.finite;
    br.hi_finite = thi.finite;
    br.xi_lo = tlo.finite ? br.xi.front() + tlo.value : kInf;
    br.xi_hi = thi.finite ? br.xi.back() + thi.value : -kInf;
    return br;
}

double eval_ddot(const CoefficientSet& cs, double x) { return robust(cs.Ddot, x); }

}  // namespace

double ProfileCurve::eval_phi(double xi) const {
    if (samples.empty()) return 0.0;
    if (xi <= samples.front().xi) return samples.front().phi;
    if (xi >= samples.back().xi) return samples.back().phi;
    auto it = std::lower_bound(samples.begin(), samples.end(), xi,
                               [](const ProfileSample& s, double v) {
                                   return s.xi < v;
                               });
    std::size_t i = static_cast<std::size_t>(it - samples.begin());
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    double t = (xi - a.xi) / (b.xi - a.xi);
    return a.phi + t * (b.phi - a.phi);
}

const ProfileJunction* ProfileCurve::junction_at(double level,
                                                 bool from_above) const {
    for (const auto& j : junctions)
        if (std::abs(j.level - level) < 1e-12 && j.from_above == from_above)
            return &j;
    return nullptr;
}

ProfileCurve reconstruct_profile(const CoefficientSet& cs, const GluedZ& gz,
                                 std::optional<double> anchor,
                                 const SolverOptions& opt) {
    Fn q = [&cs](double x) { return cs.q(x); };
    double tolz = zero_tolerance(q, 0.0, 1.0, opt.grid);

    auto spans = branch_spans(gz, tolz);
    // Work from the topmost branch down.
    std::sort(spans.begin(), spans.end(),
              [](auto a, auto b) { return a.first > b.first; });

    double default_anchor = 0.5 * (gz.alpha + 1.0);
    std::vector<Branch> branches;
    for (auto [lo, hi] : spans)
        branches.push_back(integrate_branch(cs, gz, lo, hi, default_anchor));

    ProfileCurve pc;
    pc.c = gz.c;
    pc.alpha = gz.alpha;
    pc.gamma = gz.gamma;

    // Glue: each next (lower) branch starts where the previous one ended.
    for (std::size_t b = 1; b < branches.size(); ++b) {
        if (!branches[b - 1].lo_finite || !branches[b].hi_finite)
            throw SolverError(
                "cannot glue branches: infinite reaching time at an interior level");
        double shift = branches[b - 1].xi_lo - branches[b].xi_hi;
        for (auto& x : branches[b].xi) x += shift;
        branches[b].xi_lo += shift;
        branches[b].xi_hi += shift;
    }

    // Assemble samples in ascending xi (descending phi).
    for (std::size_t b = 0; b < branches.size(); ++b) {
        Branch& br = branches[b];
        // Top of the branch.
        if (b == 0) {
            if (br.hi_finite) {
                double slope = br.dphi.back();
                for (int k = 5; k >= 1; --k)
                    pc.samples.push_back(
                        {br.xi_hi - 0.4 * k, br.hi, 0.0});
                pc.samples.push_back({br.xi_hi, br.hi, slope});
            }
            pc.junctions.push_back({br.hi, br.hi_finite ? br.xi_hi : 0.0,
                                    br.hi_finite, true, gz.eval(br.hi)});
        } else {
            pc.junctions.push_back({br.hi, br.xi_hi, true, false, gz.eval(br.hi)});
        }
        for (std::size_t i = br.phi.size(); i-- > 0;) {
            if (!br.hi_finite && br.hi - br.phi[i] < 1e-6) continue;
            if (!br.lo_finite && br.phi[i] - br.lo < 1e-6) continue;
            pc.samples.push_back({br.xi[i], br.phi[i], br.dphi[i]});
        }
        if (b + 1 == branches.size()) {
            pc.junctions.push_back({br.lo, br.lo_finite ? br.xi_lo : 0.0,
                                    br.lo_finite, true, gz.eval(br.lo)});
            if (br.lo_finite) {
                pc.samples.push_back({br.xi_lo, br.lo, br.dphi.front()});
                for (int k = 1; k <= 5; ++k)
                    pc.samples.push_back({br.xi_lo + 0.4 * k, br.lo, 0.0});
            }
        } else {
            pc.junctions.push_back({br.lo, br.xi_lo, true, true, gz.eval(br.lo)});
            pc.samples.push_back({br.xi_lo, br.lo, br.dphi.front()});
        }
    }

    // Interior crossing of gamma (no junction when the flux is nonzero
    // there, but the abscissa is still useful).
    if (gz.tag == CaseTag::AlphaGreater ||
        (gz.tag == CaseTag::AlphaLess && std::abs(gz.z_gamma) > tolz)) {
        for (std::size_t i = 1; i < pc.samples.size(); ++i) {
            const auto& a = pc.samples[i - 1];
            const auto& b = pc.samples[i];
            if ((a.phi - gz.gamma) * (b.phi - gz.gamma) <= 0.0 &&
                a.phi != b.phi) {
                double t = (a.phi - gz.gamma) / (a.phi - b.phi);
                pc.junctions.push_back({gz.gamma, a.xi + t * (b.xi - a.xi),
                                        true, true, gz.z_gamma});
                break;
            }
        }
    }

    std::sort(pc.samples.begin(), pc.samples.end(),
              [](const ProfileSample& a, const ProfileSample& b) {
                  return a.xi < b.xi;
              });
    pc.samples.erase(
        std::unique(pc.samples.begin(), pc.samples.end(),
                    [](const ProfileSample& a, const ProfileSample& b) {
                        return std::abs(a.xi - b.xi) < 1e-15;
                    }),
        pc.samples.end());

    // Re-anchor to the requested level.
    double target = anchor.value_or(default_anchor);
    double xi_star = 0.0;
    bool found = false;
    for (std::size_t i = 1; i < pc.samples.size() && !found; ++i) {
        const auto& a = pc.samples[i - 1];
        const auto& b = pc.samples[i];
        if ((a.phi - target) * (b.phi - target) <= 0.0 && a.phi != b.phi) {
            double t = (a.phi - target) / (a.phi - b.phi);
            xi_star = a.xi + t * (b.xi - a.xi);
            found = true;
        }
    }
    if (found && xi_star != 0.0) {
        for (auto& s : pc.samples) s.xi -= xi_star;
        for (auto& j : pc.junctions)
            if (j.finite) j.xi -= xi_star;
    }
    return pc;
}

ProfileCurve insert_plateau(const ProfileCurve& p, double delta_left,
                            double delta_right) {
    if (delta_left < 0.0 || delta_right < 0.0)
        throw SolverError("plateau widths must be non-negative");
    const ProfileJunction* ja = nullptr;
    for (const auto& j : p.junctions) {
        if (std::abs(j.level - p.gamma) < 1e-12 && j.finite) {
            if (std::abs(j.flux) > 1e-6)
                throw SolverError(
                    "plateau rejected: the flux does not vanish at gamma");
            ja = &j;
        }
    }
    if (!ja)
        throw SolverError(
            "plateau rejected: gamma is not reached at a finite abscissa");
    double xi0 = ja->xi;

    ProfileCurve out = p;
    out.samples.clear();
    for (const auto& s : p.samples) {
        ProfileSample t = s;
        if (s.xi < xi0 - 1e-15) t.xi -= delta_left;
        else if (s.xi > xi0 + 1e-15) t.xi += delta_right;
        else continue;  // replaced by the plateau endpoints below
        out.samples.push_back(t);
    }
    int n_plat = 9;
    for (int k = 0; k <= n_plat; ++k) {
        double x = xi0 - delta_left +
                   (delta_left + delta_right) * k / n_plat;
        out.samples.push_back({x, p.gamma, 0.0});
    }
    std::sort(out.samples.begin(), out.samples.end(),
              [](const ProfileSample& a, const ProfileSample& b) {
                  return a.xi < b.xi;
              });
    for (auto& j : out.junctions) {
        if (!j.finite) continue;
        if (j.xi < xi0 - 1e-15) j.xi -= delta_left;
        else if (j.xi > xi0 + 1e-15) j.xi += delta_right;
        else j.xi = j.from_above ? xi0 - delta_left : xi0 + delta_right;
    }
    out.plateaus.push_back({p.gamma, xi0 - delta_left, xi0 + delta_right});
    return out;
}

SharpnessClass classify_at_alpha(const CoefficientSet& cs,
                                 const ThresholdSet& ts, double c,
                                 const SolverOptions& opt) {
    SharpnessClass sc;
    sc.location = cs.alpha;
    double tolc = std::max(10.0 * opt.bisect_tol, 1e-9);
    double h_a = ts.h_alpha;
    double dd = eval_ddot(cs, cs.alpha);
    double g_a = robust(cs.g, cs.alpha);
    bool dd_neg = dd < -1e-12;
    double qdot = dd * g_a;

    auto slopes = [&]() { return indicial_slopes(qdot, h_a, c); };
    auto bracketed = [&](double Q) { return dd_neg ? Q : -kInf; };

    if (cs.alpha > cs.gamma + 1e-14) {
        if (dd_neg || c > h_a + tolc) {
            auto [s_minus, s_plus] = slopes();
            (void)s_plus;
            double v = g_a / s_minus;
            sc.kind = SharpnessClass::ClassicalNegative;
            sc.left_slope = sc.right_slope = v;
        } else {
            sc.kind = SharpnessClass::SharpInfinite;
            sc.left_slope = sc.right_slope = -kInf;
        }
        return sc;
    }

    if (cs.alpha < cs.gamma - 1e-14) {
        bool at11 = ts.c11.finite && std::abs(c - ts.c11.value) <= tolc;
        bool at31 = ts.c31.present && ts.c31.finite &&
                    std::abs(c - ts.c31.value) <= tolc;
        auto [s_minus, s_plus] = slopes();
        double v_plus = g_a / s_plus;
        double v_minus = s_minus != 0.0 ? bracketed(g_a / s_minus) : -kInf;
        if (!at11 && !at31) {
            sc.kind = SharpnessClass::ClassicalNegative;
            sc.left_slope = sc.right_slope = v_plus;
        } else if (at11 && at31) {
            sc.left_slope = sc.right_slope = v_minus;
            sc.kind = std::isfinite(v_minus) ? SharpnessClass::ClassicalNegative
                                             : SharpnessClass::SharpInfinite;
        } else if (at11) {
            sc.kind = SharpnessClass::Corner;
            sc.right_slope = v_plus;
            sc.left_slope = v_minus;
        } else {
            sc.kind = SharpnessClass::Corner;
            sc.left_slope = v_plus;
            sc.right_slope = v_minus;
        }
        return sc;
    }

    // alpha == gamma: one-sided values at the two reaching abscissae.
    double right;
    if (ts.c11.finite && c < ts.c11.value - tolc) {
        right = 0.0;
    } else if (ts.c11.finite && std::abs(c - ts.c11.value) <= tolc &&
               c < h_a - tolc) {
        right = bracketed((h_a - c) / dd);
    } else if (std::abs(c - h_a) <= tolc) {
        right = dd_neg ? 0.0 : -kInf;
    } else {
        right = 0.0;
    }
    double left;
    if (std::abs(c - h_a) <= tolc && dd_neg) {
        left = 0.0;
    } else if (c < h_a - tolc) {
        left = bracketed((h_a - c) / dd);
    } else {
        left = 0.0;
    }
    sc.left_slope = left;
    sc.right_slope = right;
    if (left == 0.0 && right == 0.0) sc.kind = SharpnessClass::ClassicalZero;
    else if (left == right && std::isfinite(left))
        sc.kind = SharpnessClass::ClassicalNegative;
    else if (left == -kInf && right == -kInf)
        sc.kind = SharpnessClass::SharpInfinite;
    else
        sc.kind = SharpnessClass::Corner;
    return sc;
}

ResidualReport residual(const ProfileCurve& p, const CoefficientSet& cs,
                        double c) {
    ResidualReport rep;
    const auto& S = p.samples;
    auto in_plateau = [&](double xi) {
        for (const auto& pl : p.plateaus)
            if (xi > pl.xi_lo - 1e-12 && xi < pl.xi_hi + 1e-12) return true;
        return false;
    };

    // Strong form on interior five-point stencils where D is bounded away
    // from zero.  The flux derivative uses exact finite-difference weights
    // for the (nonuniform) sample grid; stencils straddling a junction or
    // plateau are skipped because phi' may have a corner there.
    auto stencil_clear = [&](double lo, double hi) {
        for (const auto& j : p.junctions)
            if (j.finite && j.xi > lo && j.xi < hi) return false;
        for (const auto& pl : p.plateaus)
            if (pl.xi_lo < hi && pl.xi_hi > lo) return false;
        return true;
    };
    for (std::size_t i = 2; i + 2 < S.size(); ++i) {
        double Dv = robust(cs.D, S[i].phi);
        if (std::abs(Dv) <= 1e-3) continue;
        if (in_plateau(S[i].xi)) continue;
        if (!stencil_clear(S[i - 2].xi, S[i + 2].xi)) continue;
        bool ordered = true;
        double x[5], F[5];
        for (int k = 0; k < 5; ++k) {
            const auto& s = S[i - 2 + k];
            x[k] = s.xi - S[i].xi;
            F[k] = robust(cs.D, s.phi) * s.dphi;
            if (k > 0 && x[k] <= x[k - 1]) ordered = false;
        }
        if (!ordered) continue;
        // derivative of the degree-4 interpolant at the center node
        double dflux = 0.0;
        for (int k = 0; k < 5; ++k) {
            double num = 0.0, den = 1.0;
            for (int a = 0; a < 5; ++a) {
                if (a == k) continue;
                den *= x[k] - x[a];
                if (k == 2) continue;
                double prod = 1.0;
                for (int b = 0; b < 5; ++b) {
                    if (b == k || b == a) continue;
                    prod *= x[2] - x[b];
                }
                num += prod;
            }
            if (k == 2) {
                for (int a = 0; a < 5; ++a) {
                    if (a == 2) continue;
                    double prod = 1.0;
                    for (int b = 0; b < 5; ++b) {
                        if (b == 2 || b == a) continue;
                        prod *= x[2] - x[b];
                    }
                    num += prod;
                }
            }
            dflux += F[k] * num / den;
        }
        double hval = robust(cs.h, S[i].phi);
        double gval = robust(cs.g, S[i].phi);
        double r = dflux + (c - hval) * S[i].dphi + gval;
        double scale = 1.0 + std::abs(dflux) + std::abs((c - hval) * S[i].dphi) +
                       std::abs(gval);
        rep.interior_max = std::max(rep.interior_max, std::abs(r) / scale);
    }

    // Weak form against smooth bumps spread across the sampled window.
    if (S.size() > 4) {
        double a = S.front().xi, b = S.back().xi;
        double width = (b - a) / 6.0;
        for (int j = 0; j < 5; ++j) {
            double center = a + (b - a) * (j + 1) / 6.0;
            auto bump = [&](double x) {
                double t = (x - center) / width;
                return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
            };
            auto bump_d = [&](double x) {
                double t = (x - center) / width;
                if (std::abs(t) >= 1.0) return 0.0;
                double u = 1.0 - t * t;
                return std::exp(-1.0 / u) * (-2.0 * t / (u * u)) / width;
            };
            double acc = 0.0;
            for (std::size_t i = 1; i < S.size(); ++i) {
                double dx = S[i].xi - S[i - 1].xi;
                if (dx <= 0.0) continue;
                auto term = [&](const ProfileSample& s) {
                    double Dv = robust(cs.D, s.phi);
                    double hv = robust(cs.h, s.phi);
                    double gv = robust(cs.g, s.phi);
                    return -Dv * s.dphi * bump_d(s.xi) +
                           ((c - hv) * s.dphi + gv) * bump(s.xi);
                };
                acc += 0.5 * dx * (term(S[i]) + term(S[i - 1]));
            }
            rep.weak_max = std::max(rep.weak_max, std::abs(acc));
        }
    }
    return rep;
}

GluedZ extract_z(const ProfileCurve& p, const CoefficientSet& cs) {
    GluedZ gz;
    gz.c = p.c;
    gz.alpha = p.alpha;
    gz.gamma = p.gamma;
    gz.tag = p.alpha > p.gamma + 1e-14   ? CaseTag::AlphaGreater
             : p.alpha < p.gamma - 1e-14 ? CaseTag::AlphaLess
                                         : CaseTag::AlphaEqual;
    auto in_plateau = [&](double xi) {
        for (const auto& pl : p.plateaus)
            if (xi > pl.xi_lo - 1e-12 && xi < pl.xi_hi + 1e-12) return true;
        return false;
    };

    // Split levels: alpha always; gamma when a zero-flux junction exists.
    std::vector<double> levels = {p.alpha};
    for (const auto& j : p.junctions)
        if (std::abs(j.level - p.gamma) < 1e-12 && std::abs(j.flux) < 1e-6 &&
            std::abs(p.gamma - p.alpha) > 1e-12)
            levels.push_back(p.gamma);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    auto piece_index = [&](double phi) {
        std::size_t k = 0;
        for (double lv : levels)
            if (phi > lv) ++k;
        return k;
    };

    std::vector<ZCurve> pieces(levels.size() + 1);
    std::vector<double> bounds = {0.0};
    for (double lv : levels) bounds.push_back(lv);
    bounds.push_back(1.0);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        pieces[k].sigma1 = bounds[k];
        pieces[k].sigma2 = bounds[k + 1];
    }

    for (auto it = p.samples.rbegin(); it != p.samples.rend(); ++it) {
        const auto& s = *it;  // reversed: phi ascending
        if (in_plateau(s.xi)) continue;
        if (s.phi <= 1e-9 || s.phi >= 1.0 - 1e-9) continue;
        bool is_level = false;
        for (double lv : levels)
            if (std::abs(s.phi - lv) < 1e-12) is_level = true;
        if (is_level) continue;
        std::size_t k = piece_index(s.phi);
        ZCurve& pc = pieces[k];
        if (!pc.phi.empty() && s.phi <= pc.phi.back()) continue;
        pc.phi.push_back(s.phi);
        pc.z.push_back(robust(cs.D, s.phi) * s.dphi);
    }
    for (auto& pc : pieces)
        if (!pc.phi.empty()) gz.pieces.push_back(std::move(pc));
    for (const auto& j : p.junctions)
        if (std::abs(j.level - p.gamma) < 1e-12) gz.z_gamma = j.flux;
    return gz;
}

}  // namespace tw
