#include "tw/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace tw {

namespace {

using nlohmann::json;

Piecewise coefficient_from_json(const json& j) {
    if (j.is_string())
        return Piecewise(parse_expression(j.get<std::string>()));
    if (j.is_array()) {
        std::vector<Piecewise::Piece> pieces;
        double lo = 0.0;
        for (const auto& pj : j) {
            double hi = pj.at("to").get<double>();
            pieces.push_back(
                {lo, hi, parse_expression(pj.at("expr").get<std::string>())});
            lo = hi;
        }
        if (std::abs(lo - 1.0) > 1e-12)
            throw std::invalid_argument("coefficient pieces must cover [0,1]");
        return Piecewise(std::move(pieces));
    }
    throw std::invalid_argument("coefficient must be a string or piece array");
}

const char* inclusion_str(Inclusion i) {
    switch (i) {
        case Inclusion::Yes: return "yes";
        case Inclusion::No: return "no";
        default: return "unknown";
    }
}

json threshold_to_json(const Threshold& t) {
    json j;
    j["present"] = t.present;
    if (!t.present) return j;
    j["finite"] = t.finite;
    j["value"] = t.finite ? json(t.value)
                          : json(t.minus_infinite ? "-inf" : "+inf");
    auto bound = [](const Bound& b) {
        return b.finite ? json(b.value) : json(nullptr);
    };
    j["lower"] = bound(t.lower);
    j["upper"] = bound(t.upper);
    j[t.sharp_is_upper ? "upper_sharp" : "lower_sharp"] = bound(t.sharp);
    return j;
}

}  // namespace

ProblemFile problem_from_json(const nlohmann::json& j) {
    ProblemFile pf;
    std::optional<Piecewise> f, h;
    if (j.contains("f")) f = coefficient_from_json(j.at("f"));
    if (j.contains("h")) h = coefficient_from_json(j.at("h"));
    Piecewise D = coefficient_from_json(j.at("D"));
    Piecewise g = coefficient_from_json(j.at("g"));
    double alpha = j.at("alpha").get<double>();
    double gamma = j.at("gamma").get<double>();
    int grid = j.value("grid", 2048);
    pf.cs = make_coefficient_set(std::move(f), std::move(D), std::move(g),
                                 std::move(h), alpha, gamma, grid);
    pf.opt.grid = grid;
    if (j.contains("tol")) {
        const auto& t = j.at("tol");
        pf.opt.bisect_tol = t.value("bisection", pf.opt.bisect_tol);
        pf.opt.reltol = t.value("ode", pf.opt.reltol);
        pf.opt.zero_scale = t.value("z_zero", pf.opt.zero_scale);
    }
    pf.name = j.value("name", "");
    return pf;
}

ProblemFile load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open problem file: " + path);
    json j;
    in >> j;
    return problem_from_json(j);
}

nlohmann::json validation_to_json(const ValidationReport& rep) {
    json j;
    j["ok"] = rep.ok();
    json arr = json::array();
    for (const auto& i : rep.issues)
        arr.push_back({{"assumption", i.assumption},
                       {"message", i.message},
                       {"witness", i.witness}});
    j["issues"] = arr;
    return j;
}

nlohmann::json thresholds_to_json(const ThresholdSet& ts) {
    json j;
    j["c11"] = threshold_to_json(ts.c11);
    j["c12"] = threshold_to_json(ts.c12);
    j["c31"] = threshold_to_json(ts.c31);
    j["c32"] = threshold_to_json(ts.c32);
    j["h_alpha"] = ts.h_alpha;
    j["h_one"] = ts.h_one;
    return j;
}

nlohmann::json report_to_json(const SpeedReport& rep) {
    json j;
    switch (rep.tag) {
        case CaseTag::AlphaGreater: j["case"] = "alpha_greater"; break;
        case CaseTag::AlphaEqual: j["case"] = "alpha_equal"; break;
        case CaseTag::AlphaLess: j["case"] = "alpha_less"; break;
    }
    j["thresholds"] = thresholds_to_json(rep.thresholds);
    json J;
    J["empty"] = rep.J.empty;
    if (!rep.J.empty) {
        J["singleton"] = rep.J.singleton;
        J["lo"] = rep.J.lo;
        J["hi"] = rep.J.hi;
        J["lo_included"] = inclusion_str(rep.J.lo_inc);
        J["hi_included"] = inclusion_str(rep.J.hi_inc);
    }
    j["J"] = J;
    j["growth"] = growth_to_json(rep.growth);
    if (rep.family_valid) {
        j["family"] = {{"c", rep.c_rep},
                       {"beta", rep.beta_rep},
                       {"lambda_critical", rep.lambda_rep}};
    }
    return j;
}

nlohmann::json condition_to_json(const std::string& id,
                                 const ConditionReport& rep) {
    json j;
    j["condition"] = id;
    switch (rep.verdict) {
        case Verdict::Holds: j["holds"] = "yes"; break;
        case Verdict::Fails: j["holds"] = "no"; break;
        default: j["holds"] = "undecidable"; break;
    }
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["detail"] = rep.detail;
    return j;
}

nlohmann::json growth_to_json(const GrowthFlags& gf) {
    return {{"sublinear_left", gf.g_sublinear_left},
            {"sublinear_right", gf.g_sublinear_right},
            {"integrability", gf.integrability},
            {"tau", gf.tau},
            {"L", gf.L}};
}

nlohmann::json sharpness_to_json(const SharpnessClass& sc) {
    json j;
    j["location"] = sc.location;
    switch (sc.kind) {
        case SharpnessClass::ClassicalZero: j["kind"] = "classical-zero-slope"; break;
        case SharpnessClass::ClassicalNegative: j["kind"] = "classical-negative"; break;
        case SharpnessClass::SharpInfinite: j["kind"] = "sharp-infinite"; break;
        case SharpnessClass::Corner: j["kind"] = "corner"; break;
    }
    auto slope = [](double v) {
        return std::isfinite(v) ? json(v) : json("-inf");
    };
    j["left_slope"] = slope(sc.left_slope);
    j["right_slope"] = slope(sc.right_slope);
    return j;
}

nlohmann::json profile_meta_to_json(const ProfileCurve& p) {
    json j;
    j["c"] = p.c;
    json js = json::array();
    for (const auto& jn : p.junctions) {
        json e;
        e["level"] = jn.level;
        e["finite"] = jn.finite;
        e["xi"] = jn.finite ? json(jn.xi)
                            : json(jn.level > p.alpha ? "-inf" : "+inf");
        e["flux"] = jn.flux;
        e["from_above"] = jn.from_above;
        js.push_back(e);
    }
    j["junctions"] = js;
    json pl = json::array();
    for (const auto& r : p.plateaus)
        pl.push_back({{"level", r.level}, {"xi_lo", r.xi_lo}, {"xi_hi", r.xi_hi}});
    j["plateaus"] = pl;
    return j;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_profile_csv(std::ostream& os, const ProfileCurve& p) {
    os << "xi,phi,dphi\n";
    for (const auto& s : p.samples) {
        double d = std::isfinite(s.dphi) ? s.dphi : 0.0;
        os << format_double(s.xi) << ',' << format_double(s.phi) << ','
           << format_double(d) << '\n';
    }
}

}  // namespace tw
