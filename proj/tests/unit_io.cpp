#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "tw/problem_io.hpp"

#ifndef PROBLEMS_DIR
#define PROBLEMS_DIR "problems"
#endif
#ifndef TWFRONT_BIN
#define TWFRONT_BIN "twfront"
#endif

using namespace tw;
using nlohmann::json;

static std::string problem(const char* name) {
    return std::string(PROBLEMS_DIR) + "/" + name;
}

TEST_CASE("problem files parse into coefficient sets") {
    ProblemFile pf = load_problem_file(problem("cubic_convection_agtg.json"));
    CHECK(pf.cs.alpha == doctest::Approx(0.6));
    CHECK(pf.cs.gamma == doctest::Approx(0.3));
    CHECK(pf.cs.D(0.6) == doctest::Approx(0.0));
    CHECK(pf.cs.f.has_value());
    CHECK(pf.cs.h(0.0) == doctest::Approx(-0.3));
    CHECK(!pf.name.empty());
}

TEST_CASE("piecewise coefficients cover the interval") {
    json j = {
        {"alpha", 0.5},
        {"gamma", 0.5},
        {"D", {{{"expr", "0.5-phi"}, {"to", 0.5}},
               {{"expr", "0.5-phi"}, {"to", 1.0}}}},
        {"g", "phi*(1-phi)*(phi-0.5)"},
        {"h", "0"},
    };
    ProblemFile pf = problem_from_json(j);
    CHECK(pf.cs.D(0.25) == doctest::Approx(0.25));

    json bad = j;
    bad["D"] = {{{"expr", "0.5-phi"}, {"to", 0.7}}};
    CHECK_THROWS(problem_from_json(bad));
}

TEST_CASE("malformed problems are rejected with a reason") {
    CHECK_THROWS(load_problem_file(problem("no_such_file.json")));
    json j = {{"alpha", 0.6}, {"gamma", 0.3}, {"D", "0.6-phi"}};
    CHECK_THROWS(problem_from_json(j));  // g missing
    json badexpr = {{"alpha", 0.6},
                    {"gamma", 0.3},
                    {"D", "0.6-phi"},
                    {"g", "phi*(1-phi)*(phi-"},
                    {"h", "0"}};
    CHECK_THROWS(problem_from_json(badexpr));
}

TEST_CASE("report serialization uses the documented field names") {
    ProblemFile pf = load_problem_file(problem("cubic_convection_altg.json"));
    SpeedReport rep = admissible_speeds(pf.cs, pf.opt);
    json j = report_to_json(rep);
    CHECK(j["case"] == "alpha_less");
    CHECK(j["J"].contains("lo"));
    CHECK(j["J"].contains("hi"));
    CHECK(j["J"]["lo_included"] == "no");
    CHECK(j["J"]["hi_included"] == "yes");
    CHECK(j["thresholds"]["c11"]["present"] == true);
    CHECK(j["thresholds"]["c12"]["present"] == false);

    ThresholdSet ts;
    ts.c11.present = true;
    ts.c11.finite = false;
    json tj = thresholds_to_json(ts);
    CHECK(tj["c11"]["value"] == "+inf");
}

TEST_CASE("profile csv has the documented header and full precision") {
    ProfileCurve pc;
    pc.samples = {{-1.0, 0.75, -0.125}, {0.0, 0.5, -0.25}};
    std::ostringstream os;
    write_profile_csv(os, pc);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "xi,phi,dphi");
    std::getline(is, line);
    CHECK(line.find("0.75") != std::string::npos);
    CHECK(format_double(1.0 / 3.0).find("0.333333333333333") !=
          std::string::npos);
}

// --- command line driver ----------------------------------------------

static int run_cli(const std::string& args, std::string* out = nullptr) {
    std::string cmd = std::string(TWFRONT_BIN) + " " + args;
    std::string tmp = "cli_out.tmp";
    cmd += " > " + tmp + " 2>&1";
    int rc = std::system(cmd.c_str());
    if (out) {
        std::ifstream f(tmp);
        std::stringstream ss;
        ss << f.rdbuf();
        *out = ss.str();
    }
    std::remove(tmp.c_str());
    return WEXITSTATUS(rc);
}

TEST_CASE("cli: validate reports structural problems and exit codes") {
    CHECK(run_cli("validate --problem " +
                  problem("cubic_convection_agtg.json")) == 0);
    // the degenerate-at-zero examples fail the structural assumptions
    CHECK(run_cli("validate --problem " +
                  problem("nonlipschitz_noplateau.json")) == 2);
    CHECK(run_cli("validate --problem " + problem("no_such_file.json")) == 2);
}

TEST_CASE("cli: speeds emits json with stable names") {
    std::string out;
    int rc = run_cli("speeds --format json --problem " +
                         problem("cubic_convection_agtg.json"),
                     &out);
    CHECK(rc == 0);
    json j = json::parse(out);
    CHECK(j["case"] == "alpha_greater");
    CHECK(j["J"]["singleton"] == true);
}

TEST_CASE("cli: inadmissible speeds exit with code 3") {
    CHECK(run_cli("classify --c 5.0 --problem " +
                  problem("cubic_convection_agtg.json")) == 3);
    CHECK(run_cli("classify --c 0.0 --problem " +
                  problem("cubic_convection_agtg.json")) == 0);
}

TEST_CASE("cli: golden corpus passes end to end") {
    std::string out;
    int rc = run_cli("golden --dir " + std::string(PROBLEMS_DIR), &out);
    CHECK(rc == 0);
    CHECK(out.find("FAIL") == std::string::npos);
}
