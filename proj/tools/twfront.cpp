// Command-line front end: admissible wavefront speeds and profiles for
// reaction-convection-diffusion equations whose diffusivity changes sign.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tw/problem_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNotAdmissible = 3;
constexpr int kExitNumerical = 4;

struct Emitter {
    std::string format = "text";
    std::ostream& os;

    void emit(const json& j) const {
        if (format == "json") {
            os << j.dump(2) << '\n';
            return;
        }
        print(j, "");
    }

    void print(const json& j, const std::string& prefix) const {
        if (j.is_object()) {
            for (const auto& [k, v] : j.items())
                print(v, prefix.empty() ? k : prefix + "." + k);
        } else if (j.is_array()) {
            std::size_t i = 0;
            for (const auto& v : j) print(v, prefix + "[" + std::to_string(i++) + "]");
        } else if (j.is_number_float()) {
            os << prefix << " = " << tw::format_double(j.get<double>()) << '\n';
        } else {
            os << prefix << " = " << j.dump() << '\n';
        }
    }
};

double default_speed(const tw::SpeedReport& rep) {
    if (rep.J.empty)
        throw tw::SolverError("no admissible speeds for this problem");
    if (rep.J.singleton) return rep.J.lo;
    if (rep.J.hi_inc == tw::Inclusion::Yes) return rep.J.hi;
    return 0.5 * (rep.J.lo + rep.J.hi);
}

int run_golden(const std::string& dir, const Emitter& em);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"admissible speeds and profiles of traveling wavefronts "
                 "for sign-changing diffusivities"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string problem_path, out_dir = ".", format = "text";
    double tol = -1.0;
    int grid = -1;
    app.add_option("--problem", problem_path, "problem file (JSON)");
    app.add_option("--tol", tol, "bisection tolerance override");
    app.add_option("--grid", grid, "grid size override");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* cmd_validate = app.add_subcommand("validate", "check structural assumptions");
    auto* cmd_thresholds = app.add_subcommand("thresholds", "the four named critical speeds");
    auto* cmd_speeds = app.add_subcommand("speeds", "the admissible speed set J");
    auto* cmd_profile = app.add_subcommand("profile", "reconstruct a wavefront profile");
    auto* cmd_classify = app.add_subcommand("classify", "one-sided slopes at alpha");
    auto* cmd_check = app.add_subcommand("check", "existence conditions");
    auto* cmd_golden = app.add_subcommand("golden", "run the bundled example corpus");

    double opt_c = std::numeric_limits<double>::quiet_NaN();
    double opt_lambda = std::numeric_limits<double>::quiet_NaN();
    double opt_anchor = std::numeric_limits<double>::quiet_NaN();
    double plateau_l = 0.0, plateau_r = 0.0;
    cmd_profile->add_option("--c", opt_c, "wave speed (default: picked from J)");
    cmd_profile->add_option("--lambda", opt_lambda, "junction family parameter");
    cmd_profile->add_option("--anchor", opt_anchor, "phi value placed at xi=0");
    cmd_profile->add_option("--plateau-left", plateau_l, "plateau width left of gamma");
    cmd_profile->add_option("--plateau-right", plateau_r, "plateau width right of gamma");
    cmd_classify->add_option("--c", opt_c, "wave speed (default: picked from J)");
    std::string which = "all";
    cmd_check->add_option("--which", which, "condition to check")
        ->check(CLI::IsMember({"all", "growth", "necessary-convex",
                               "sufficient-convex", "sufficient-concave"}));
    std::string golden_dir = "problems";
    cmd_golden->add_option("--dir", golden_dir, "corpus directory");

    CLI11_PARSE(app, argc, argv);
    Emitter em{format, std::cout};

    try {
        if (cmd_golden->parsed()) return run_golden(golden_dir, em);

        if (problem_path.empty()) {
            std::cerr << "error: --problem is required\n";
            return kExitInvalid;
        }
        tw::ProblemFile pf;
        try {
            pf = tw::load_problem_file(problem_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitInvalid;
        }
        if (tol > 0.0) pf.opt.bisect_tol = tol;
        if (grid > 0) {
            pf.opt.grid = grid;
            pf.cs.grid = grid;
        }

        tw::ValidationReport vr = pf.cs.validate();
        if (cmd_validate->parsed()) {
            em.emit(tw::validation_to_json(vr));
            return vr.ok() ? kExitOk : kExitInvalid;
        }
        if (!vr.ok()) {
            std::cerr << "error: problem fails structural assumptions; "
                         "run `validate` for details\n";
            return kExitInvalid;
        }

        if (cmd_thresholds->parsed()) {
            em.emit(tw::thresholds_to_json(
                tw::compute_named_thresholds(pf.cs, pf.opt)));
            return kExitOk;
        }
        if (cmd_speeds->parsed()) {
            em.emit(tw::report_to_json(tw::admissible_speeds(pf.cs, pf.opt)));
            return kExitOk;
        }
        if (cmd_check->parsed()) {
            json out;
            if (which == "all" || which == "growth")
                out["growth"] = tw::growth_to_json(tw::check_g_growth(pf.cs));
            if (which == "all" || which == "necessary-convex")
                out["necessary_convex"] = tw::condition_to_json(
                    "necessary-convex", tw::check_necessary_convex(pf.cs));
            if (which == "all" || which == "sufficient-convex")
                out["sufficient_convex"] = tw::condition_to_json(
                    "sufficient-convex", tw::check_sufficient_convex(pf.cs));
            if (which == "all" || which == "sufficient-concave")
                out["sufficient_concave"] = tw::condition_to_json(
                    "sufficient-concave", tw::check_sufficient_concave(pf.cs));
            em.emit(out);
            return kExitOk;
        }

        // Remaining subcommands need the speed set.
        tw::SpeedReport rep = tw::admissible_speeds(pf.cs, pf.opt);
        double c = std::isnan(opt_c) ? default_speed(rep) : opt_c;
        if (!rep.J.contains(c, 10.0 * pf.opt.bisect_tol)) {
            std::cerr << "error: speed " << c << " is not admissible\n";
            return kExitNotAdmissible;
        }

        if (cmd_classify->parsed()) {
            em.emit(tw::sharpness_to_json(
                tw::classify_at_alpha(pf.cs, rep.thresholds, c, pf.opt)));
            return kExitOk;
        }
        if (cmd_profile->parsed()) {
            std::optional<double> lambda;
            if (!std::isnan(opt_lambda)) lambda = opt_lambda;
            tw::GluedZ gz = tw::solve_z_for_speed(pf.cs, rep, c, lambda, pf.opt);
            std::optional<double> anchor;
            if (!std::isnan(opt_anchor)) anchor = opt_anchor;
            tw::ProfileCurve pc =
                tw::reconstruct_profile(pf.cs, gz, anchor, pf.opt);
            if (plateau_l > 0.0 || plateau_r > 0.0)
                pc = tw::insert_plateau(pc, plateau_l, plateau_r);
            fs::create_directories(out_dir);
            std::ofstream csv(fs::path(out_dir) / "profile.csv");
            tw::write_profile_csv(csv, pc);
            json meta = tw::profile_meta_to_json(pc);
            meta["sharpness"] = tw::sharpness_to_json(
                tw::classify_at_alpha(pf.cs, rep.thresholds, c, pf.opt));
            std::ofstream mj(fs::path(out_dir) / "profile.json");
            mj << meta.dump(2) << '\n';
            em.emit(meta);
            return kExitOk;
        }
        std::cerr << "error: no subcommand\n";
        return kExitInvalid;
    } catch (const tw::SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

namespace {

int run_golden(const std::string& dir, const Emitter& em) {
    int failures = 0;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no problem files under " << dir << '\n';
        return kExitInvalid;
    }
    for (const auto& f : files) {
        std::string name = f.filename().string();
        try {
            std::ifstream in(f);
            json j;
            in >> j;
            tw::ProblemFile pf = tw::problem_from_json(j);
            bool expect_invalid = j.value("expect_invalid", false);
            tw::ValidationReport vr = pf.cs.validate();
            bool ok = expect_invalid ? !vr.ok() : vr.ok();
            std::string what = expect_invalid ? "rejected as expected" : "validate";
            if (ok && !expect_invalid) {
                tw::SpeedReport rep = tw::admissible_speeds(pf.cs, pf.opt);
                if (j.contains("expect")) {
                    const auto& ex = j.at("expect");
                    double tol = ex.value("tol", 2e-3);
                    what = "expectations";
                    if (ex.contains("J_lo"))
                        ok = ok && !rep.J.empty &&
                             std::abs(rep.J.lo - ex["J_lo"].get<double>()) < tol;
                    if (ex.contains("J_hi"))
                        ok = ok && !rep.J.empty &&
                             std::abs(rep.J.hi - ex["J_hi"].get<double>()) < tol;
                    if (ex.contains("empty"))
                        ok = ok && rep.J.empty == ex["empty"].get<bool>();
                    if (ex.contains("c11"))
                        ok = ok && rep.thresholds.c11.finite &&
                             std::abs(rep.thresholds.c11.value -
                                      ex["c11"].get<double>()) < tol;
                    if (ex.contains("c32"))
                        ok = ok && rep.thresholds.c32.finite &&
                             std::abs(rep.thresholds.c32.value -
                                      ex["c32"].get<double>()) < tol;
                }
            }
            std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << what
                      << ")\n";
            if (!ok) ++failures;
        } catch (const std::exception& e) {
            std::cout << "FAIL " << name << " (" << e.what() << ")\n";
            ++failures;
        }
    }
    (void)em;
    return failures == 0 ? kExitOk : kExitNumerical;
}

}  // namespace
